#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "logr/errors.hpp"

namespace logr {

enum class FeatureCategory { Select, From, Where };

std::string to_string(FeatureCategory c);
std::optional<FeatureCategory> category_from_string(const std::string& s);

// One atomic query element: a SELECT column, a FROM source, or a WHERE
// conjunct with constants abstracted to `?`.
struct Feature {
    FeatureCategory category;
    std::string text;

    bool operator==(const Feature& other) const = default;
    auto operator<=>(const Feature& other) const = default;

    // Rendered form, e.g. "WHERE:status=?".
    std::string str() const { return to_string(category) + ":" + text; }
};

// "CATEGORY:text" -> Feature. Throws ParseError on bad category or empty text.
Feature parse_feature(const std::string& s);

struct FeatureHash {
    std::size_t operator()(const Feature& f) const {
        return std::hash<std::string>{}(f.text) * 3 +
               static_cast<std::size_t>(f.category);
    }
};

// Bidirectional map between features and dense ids 0..n-1, in first-seen
// order.
class Vocabulary {
public:
    // Returns the id, inserting if absent.
    std::size_t intern(const Feature& f);

    std::optional<std::size_t> id_of(const Feature& f) const;
    const Feature& feature(std::size_t id) const { return features_.at(id); }
    std::size_t size() const { return features_.size(); }

    const std::vector<Feature>& features() const { return features_; }

    std::vector<std::string> to_strings() const;
    static Vocabulary from_strings(const std::vector<std::string>& strs);

    bool operator==(const Vocabulary& other) const {
        return features_ == other.features_;
    }

private:
    std::vector<Feature> features_;
    std::unordered_map<Feature, std::size_t, FeatureHash> index_;
};

}  // namespace logr
