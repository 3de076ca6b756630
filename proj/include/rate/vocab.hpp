#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rate/errors.hpp"

namespace rate {

/// Bidirectional string<->id map. Ids are assigned in first-occurrence order,
/// so re-encoding the same input reproduces the same ids.
class Vocabulary {
public:
    std::uint32_t add(std::string_view surface) {
        auto it = ids_.find(std::string(surface));
        if (it != ids_.end()) return it->second;
        if (frozen_) throw ContractError("vocabulary is frozen; unknown surface: " + std::string(surface));
        auto id = static_cast<std::uint32_t>(surfaces_.size());
        surfaces_.emplace_back(surface);
        ids_.emplace(surfaces_.back(), id);
        return id;
    }

    bool contains(std::string_view surface) const {
        return ids_.find(std::string(surface)) != ids_.end();
    }

    std::uint32_t id_of(std::string_view surface) const {
        auto it = ids_.find(std::string(surface));
        if (it == ids_.end()) throw ContractError("unknown surface: " + std::string(surface));
        return it->second;
    }

    const std::string& surface_of(std::uint32_t id) const {
        if (id >= surfaces_.size()) throw ContractError("vocabulary id out of range: " + std::to_string(id));
        return surfaces_[id];
    }

    std::size_t size() const noexcept { return surfaces_.size(); }
    bool frozen() const noexcept { return frozen_; }
    void freeze() noexcept { frozen_ = true; }

    /// Dump as `surface<TAB>id` lines, id-ordered.
    void dump(std::ostream& out) const {
        for (std::uint32_t id = 0; id < surfaces_.size(); ++id)
            out << surfaces_[id] << '\t' << id << '\n';
    }

    static Vocabulary parse(std::istream& in) {
        Vocabulary v;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            auto tab = line.find('\t');
            if (tab == std::string::npos) throw ParseError("vocabulary line missing tab", line_no);
            std::uint32_t id = 0;
            try {
                id = static_cast<std::uint32_t>(std::stoul(line.substr(tab + 1)));
            } catch (const std::exception&) {
                throw ParseError("vocabulary line has non-numeric id", line_no);
            }
            std::uint32_t assigned = v.add(line.substr(0, tab));
            if (assigned != id)
                throw ParseError("vocabulary ids must be dense and in order", line_no);
        }
        return v;
    }

private:
    std::vector<std::string> surfaces_;
    std::unordered_map<std::string, std::uint32_t> ids_;
    bool frozen_ = false;
};

}  // namespace rate
