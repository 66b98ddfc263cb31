#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "slipdet/event_detector.hpp"
#include "slipdet/friction_fit.hpp"
#include "slipdet/slip_map.hpp"

namespace slipdet::io {

// Shortest round-trip decimal form.
std::string num(double v);

std::string slipmap_csv(const std::vector<SlipMap>& maps, const std::vector<double>& times);
std::string states_csv(const std::vector<SlipMap>& maps);
std::string events_csv(const std::vector<detect::Event>& events);
std::string report_csv(const EvaluationReport& rep);
std::string summary_csv(const EvaluationReport& rep);
std::string samples_csv(const std::vector<friction::FrictionSample>& samples);
std::string model_csv(const friction::FrictionModel& m);

std::vector<SlipMap> parse_states_csv(const std::string& text);
std::vector<detect::Event> parse_events_csv(const std::string& text);

struct Series {
  std::string label;
  std::vector<double> x, y;
};

std::string line_plot_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                          const std::vector<Series>& series);

std::string read_text(const std::filesystem::path& p);

}  // namespace slipdet::io
