#include "crisisgt/topic.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace crisisgt {

namespace {

struct TopicInfo {
    std::string_view id;
    std::string_view display;
    std::string_view description;
};

constexpr TopicInfo kInfo[] = {
    {"AffectedPopulation", "Affected Population",
     "People hurt, killed, missing, found or otherwise affected by the event."},
    {"EarlyWarning", "Early Warning",
     "Warnings, alerts and forecasts issued before or during the event."},
    {"EmergencyExercises", "Emergency Exercises",
     "Preparedness drills, exercises and readiness advice."},
    {"EmotionalDistress", "Emotional Distress",
     "Fear, panic, shock or grief expressed by people living through the event."},
    {"HumanitarianEvent", "Humanitarian Event",
     "Humanitarian organisations and their missions responding to the event."},
    {"Impact", "Impact",
     "Aftermath: cleanup and rebuilding, displacement, disrupted economic activity."},
    {"InfrastructureDamage", "Infrastructure Damage",
     "Damage to buildings, roads, bridges, power lines, poles or vehicles."},
    {"VolunteeringSupport", "Volunteering Support",
     "Rescue work, volunteering, donations of money, goods or services."},
    {"Prayer", "Prayer", "Prayers, thoughts and messages of emotional support."},
    {"SupplyNeeds", "Supply Needs",
     "Urgent needs: food, water, clothing, money, medicine or blood."},
    {"Irrelevant", "Irrelevant", "Does not belong to any of the topics above."},
};

const TopicInfo& info(TopicLabel topic) { return kInfo[static_cast<int>(topic)]; }

std::string fold(std::string_view text) {
    std::string out;
    for (char c : text) {
        if (c == ' ' || c == '_' || c == '-') continue;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

}  // namespace

std::string_view to_string(TopicLabel topic) { return info(topic).id; }
std::string_view display_name(TopicLabel topic) { return info(topic).display; }
std::string_view description(TopicLabel topic) { return info(topic).description; }

std::optional<TopicLabel> parse_topic(std::string_view text) {
    const std::string key = fold(text);
    for (TopicLabel topic : kAllTopics) {
        if (fold(info(topic).id) == key) return topic;
    }
    return std::nullopt;
}

}  // namespace crisisgt
