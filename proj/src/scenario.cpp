#include "socialsim/scenario.hpp"

#include <algorithm>

namespace socialsim {

namespace {

template <typename T>
const T* find_by_id(const std::vector<T>& items, std::string_view id) {
    auto it = std::lower_bound(items.begin(), items.end(), id,
                               [](const T& item, std::string_view key) { return item.id < key; });
    if (it != items.end() && it->id == id) return &*it;
    // Documents built by hand may not be sorted.
    for (const auto& item : items)
        if (item.id == id) return &item;
    return nullptr;
}

}  // namespace

const std::vector<Effect>* ExchangeDef::effects_for(Outcome o) const {
    if (o == Outcome::Error) return nullptr;
    const auto& slot = effects[static_cast<std::size_t>(o)];
    return slot ? &*slot : nullptr;
}

const SceneTemplate* ExchangeDef::scene_for(Outcome o) const {
    if (o == Outcome::Error) return nullptr;
    const auto& slot = scenes[static_cast<std::size_t>(o)];
    return slot ? &*slot : nullptr;
}

const NetworkDecl* ScenarioDoc::find_network(std::string_view id) const { return find_by_id(networks, id); }
const StatusDecl* ScenarioDoc::find_status(std::string_view id) const { return find_by_id(statuses, id); }
const CharacterDecl* ScenarioDoc::find_character(std::string_view id) const { return find_by_id(characters, id); }
const ExchangeDef* ScenarioDoc::find_exchange(std::string_view id) const { return find_by_id(exchanges, id); }
bool ScenarioDoc::has_trait(std::string_view id) const { return find_by_id(traits, id) != nullptr; }
bool ScenarioDoc::has_relationship(std::string_view id) const { return find_by_id(relationships, id) != nullptr; }
bool ScenarioDoc::has_location(std::string_view id) const { return find_by_id(locations, id) != nullptr; }

const CharacterDecl* ScenarioDoc::player() const {
    for (const auto& c : characters)
        if (c.player) return &c;
    return nullptr;
}

bool is_known_orientation(std::string_view orientation) {
    return orientation == "straight" || orientation == "gay" || orientation == "bi" || orientation == "ace";
}

bool orientation_admits(std::string_view orientation, std::string_view own_gender,
                        std::string_view other_gender) {
    if (orientation == "bi") return true;
    if (orientation == "straight") return own_gender != other_gender;
    if (orientation == "gay") return own_gender == other_gender;
    return false;
}

}  // namespace socialsim
