#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace crisisgt {

// Closed set of disaster topics. Declaration order is the tie-break
// priority used everywhere a deterministic topic order is needed.
enum class TopicLabel {
    AffectedPopulation,
    EarlyWarning,
    EmergencyExercises,
    EmotionalDistress,
    HumanitarianEvent,
    Impact,
    InfrastructureDamage,
    VolunteeringSupport,
    Prayer,
    SupplyNeeds,
    Irrelevant,
};

inline constexpr std::array<TopicLabel, 11> kAllTopics = {
    TopicLabel::AffectedPopulation, TopicLabel::EarlyWarning,
    TopicLabel::EmergencyExercises, TopicLabel::EmotionalDistress,
    TopicLabel::HumanitarianEvent,  TopicLabel::Impact,
    TopicLabel::InfrastructureDamage, TopicLabel::VolunteeringSupport,
    TopicLabel::Prayer,             TopicLabel::SupplyNeeds,
    TopicLabel::Irrelevant,
};

/// Identifier form, e.g. "InfrastructureDamage".
std::string_view to_string(TopicLabel topic);
/// Human form, e.g. "Infrastructure Damage".
std::string_view display_name(TopicLabel topic);
/// Short annotator-facing description of what belongs in the topic.
std::string_view description(TopicLabel topic);

/// Accepts the identifier form or the display form, case-insensitively.
std::optional<TopicLabel> parse_topic(std::string_view text);

}  // namespace crisisgt
