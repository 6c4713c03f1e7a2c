#pragma once

#include <map>
#include <string>

#include "scenario.hpp"

// Shared test fixtures: a small programmatic model builder and corpus access.

namespace privlens::test {

#ifndef PRIVLENS_CORPUS_DIR
#define PRIVLENS_CORPUS_DIR "corpus"
#endif

inline std::string corpus_dir(const std::string& name) {
    return std::string(PRIVLENS_CORPUS_DIR) + "/" + name;
}

// Builds models directly, bypassing the parser, for engine-level tests.
struct ModelBuilder {
    Model m;
    TermArena a;
    std::map<std::string, int> class_by_label;

    AtomId entity(const std::string& name) {
        AtomId id = (AtomId)m.atoms.size();
        m.atoms.push_back(InfoAtom{name, Kind::Entity, id, -1});
        m.atom_by_name.emplace(name, id);
        return id;
    }

    AtomId atom(const std::string& name, Kind k, AtomId subject = -1,
                const std::string& cls = "") {
        AtomId id = (AtomId)m.atoms.size();
        int c;
        std::string label = cls.empty() ? "c_" + name : cls;
        auto it = class_by_label.find(label);
        if (it == class_by_label.end()) {
            c = (int)m.class_names.size();
            m.class_names.push_back(label);
            class_by_label.emplace(label, c);
        } else {
            c = it->second;
        }
        m.atoms.push_back(InfoAtom{name, k, k == Kind::Entity ? id : subject, c});
        m.atom_by_name.emplace(name, id);
        return id;
    }

    ItemId item(const std::string& var, const std::string& dom, const std::string& prof,
                const std::string& atom_name) {
        AtomId at = m.atom_id(atom_name);
        ItemId id = (ItemId)m.items.size();
        m.items.push_back(ContextItem{var, ContextRef{dom, prof}, at, m.atoms[at].kind});
        m.item_by_key.emplace(std::make_tuple(var, dom, prof), id);
        if (std::find(m.domains.begin(), m.domains.end(), dom) == m.domains.end())
            m.domains.push_back(dom);
        return id;
    }

    void actor(const std::string& name) { m.actors.push_back(m.atom_id(name)); }

    void prop(const std::string& id, const std::string& src, const std::string& img) {
        Property* p = nullptr;
        for (Property& q : m.props)
            if (q.id == id) p = &q;
        if (!p) {
            m.props.push_back(Property{id, {}, {}});
            p = &m.props.back();
        }
        AtomId sa = m.atom_id(src), ia = m.atom_id(img);
        p->atom_map.emplace(sa, ia);
        for (ItemId i = 0; i < (ItemId)m.items.size(); ++i) {
            if (m.items[i].atom != sa) continue;
            for (ItemId j = 0; j < (ItemId)m.items.size(); ++j)
                if (m.items[j].atom == ia && m.items[j].ctx == m.items[i].ctx)
                    p->item_map.emplace(i, j);
        }
    }

    ItemId model_item(const std::string& var, const std::string& dom, const std::string& prof) {
        ItemId it = m.find_item(var, ContextRef{dom, prof});
        if (it < 0) throw std::runtime_error("no such item " + var + "@" + dom + "." + prof);
        return it;
    }

    TermId leaf(const std::string& var, const std::string& dom, const std::string& prof) {
        return a.ctx_leaf(model_item(var, dom, prof));
    }
};

}  // namespace privlens::test
