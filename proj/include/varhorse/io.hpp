#ifndef VARHORSE_IO_HPP
#define VARHORSE_IO_HPP

#include <string>

#include <json.hpp>

#include "varhorse/measures.hpp"

namespace varhorse {

using json = nlohmann::ordered_json;

json to_json(const Vec2& v);
json to_json(const Point& p);
json to_json(const Graph1D& g);
json to_json(const Cylinder& c);
json to_json(const Rectangle& r);
json to_json(const ConeCheck& c);
json to_json(const PesinCertificate& c);
json to_json(const HyperbolicBranch& b);
json to_json(const ReferenceMeasure& mu);

Graph1D graph_from_json(const json& j);
Cylinder cylinder_from_json(const json& j);
Rectangle rectangle_from_json(const json& j);
ConeCheck cone_check_from_json(const json& j);
HyperbolicBranch branch_from_json(const json& j);
ReferenceMeasure reference_from_json(const json& j);

/// Branch set with the parameters it was certified under.
json branch_set_to_json(const std::vector<HyperbolicBranch>& branches, double rho, int s,
                        double delta, double gamma);

/// word, chart bounding box, width per cylinder; plot-ready.
std::string refinement_to_csv(const CylinderRefinement& ref);

/// one row per measure: word, period, distance, slack, pass
std::string measure_report_to_csv(const StageReport& rep);

json stage_report_to_json(const StageReport& rep);

std::string format_word(const std::vector<int>& letters);  // 1-based, dash-separated

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace varhorse

#endif
