#include "logr/feature.hpp"

namespace logr {

std::string to_string(FeatureCategory c) {
    switch (c) {
        case FeatureCategory::Select: return "SELECT";
        case FeatureCategory::From: return "FROM";
        case FeatureCategory::Where: return "WHERE";
    }
    return "?";
}

std::optional<FeatureCategory> category_from_string(const std::string& s) {
    if (s == "SELECT") return FeatureCategory::Select;
    if (s == "FROM") return FeatureCategory::From;
    if (s == "WHERE") return FeatureCategory::Where;
    return std::nullopt;
}

Feature parse_feature(const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos)
        throw ParseError("feature string lacks ':' separator: " + s);
    auto cat = category_from_string(s.substr(0, colon));
    if (!cat)
        throw ParseError("unknown feature category in: " + s);
    std::string text = s.substr(colon + 1);
    if (text.empty())
        throw ParseError("empty feature text in: " + s);
    return Feature{*cat, std::move(text)};
}

std::size_t Vocabulary::intern(const Feature& f) {
    auto it = index_.find(f);
    if (it != index_.end()) return it->second;
    std::size_t id = features_.size();
    features_.push_back(f);
    index_.emplace(f, id);
    return id;
}

std::optional<std::size_t> Vocabulary::id_of(const Feature& f) const {
    auto it = index_.find(f);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> Vocabulary::to_strings() const {
    std::vector<std::string> out;
    out.reserve(features_.size());
    for (const auto& f : features_) out.push_back(f.str());
    return out;
}

Vocabulary Vocabulary::from_strings(const std::vector<std::string>& strs) {
    Vocabulary v;
    for (const auto& s : strs) v.intern(parse_feature(s));
    if (v.size() != strs.size())
        throw ParseError("duplicate feature in vocabulary list");
    return v;
}

}  // namespace logr
