#include "slipdet/report_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace slipdet::io {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (v == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::vector<std::string>> rows_of(const std::string& text, const std::string& header) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw FormatError("unexpected CSV header '" + line + "'");
  std::vector<std::vector<std::string>> rows;
  const std::size_t width = split(header).size();
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto r = split(line);
    if (r.size() != width) throw FormatError("CSV row has " + std::to_string(r.size()) + " columns");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::size_t to_size(const std::string& s) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw FormatError("bad integer '" + s + "'");
  return v;
}

double to_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw FormatError("bad number '" + s + "'");
  return v;
}

constexpr const char* kStatesHeader = "frame,i,j,state";
constexpr const char* kEventsHeader = "frame,t,i,j,type,value,delta";

}  // namespace

std::string slipmap_csv(const std::vector<SlipMap>& maps, const std::vector<double>& times) {
  std::ostringstream o;
  o << "frame,t,sr,stick,slip,contact\n";
  for (std::size_t k = 0; k < maps.size(); ++k) {
    const auto& m = maps[k];
    o << m.frame << ',' << num(k < times.size() ? times[k] : 0.0) << ','
      << (m.ratio_defined ? num(m.ratio) : std::string("nan")) << ',' << m.stick_count << ',' << m.slip_count << ','
      << m.contact_count << '\n';
  }
  return o.str();
}

std::string states_csv(const std::vector<SlipMap>& maps) {
  std::ostringstream o;
  o << kStatesHeader << '\n';
  for (const auto& m : maps)
    for (std::size_t i = 0; i < m.states.rows; ++i)
      for (std::size_t j = 0; j < m.states.cols; ++j) o << m.frame << ',' << i << ',' << j << ',' << to_string(m.states(i, j)) << '\n';
  return o.str();
}

std::string events_csv(const std::vector<detect::Event>& events) {
  std::ostringstream o;
  o << kEventsHeader << '\n';
  for (const auto& e : events)
    o << e.frame << ',' << num(e.t) << ',' << e.i << ',' << e.j << ',' << detect::to_string(e.type) << ','
      << num(e.value) << ',' << num(e.delta) << '\n';
  return o.str();
}

std::string report_csv(const EvaluationReport& rep) {
  std::ostringstream o;
  o << "frame,stick_as_stick,stick_as_slip,slip_as_stick,slip_as_slip,accuracy,sr_estimated,sr_truth\n";
  for (std::size_t t = 0; t < rep.confusion.size(); ++t) {
    const auto& c = rep.confusion[t];
    o << t << ',' << c.stick_as_stick << ',' << c.stick_as_slip << ',' << c.slip_as_stick << ',' << c.slip_as_slip
      << ',' << num(c.accuracy()) << ',' << num(rep.sr_estimated[t]) << ',' << num(rep.sr_truth[t]) << '\n';
  }
  return o.str();
}

std::string summary_csv(const EvaluationReport& rep) {
  std::ostringstream o;
  o << "metric,value\n";
  o << "sr_rmse," << num(rep.sr_rmse) << '\n';
  o << "accuracy," << num(rep.accuracy()) << '\n';
  o << "lag_nodes," << rep.lag_nodes << '\n';
  o << "lag_within_one," << rep.lag_within_one << '\n';
  o << "fraction_within_one," << num(rep.fraction_within_one()) << '\n';
  o << "missed," << rep.missed << '\n';
  for (const auto& [lag, count] : rep.lag_histogram) o << "lag_hist_" << lag << ',' << count << '\n';
  return o.str();
}

std::string samples_csv(const std::vector<friction::FrictionSample>& samples) {
  std::ostringstream o;
  o << "frame,i,j,v,f_n,mu\n";
  for (const auto& s : samples)
    o << s.frame << ',' << s.i << ',' << s.j << ',' << num(s.v) << ',' << num(s.f_n) << ',' << num(s.mu) << '\n';
  return o.str();
}

std::string model_csv(const friction::FrictionModel& m) {
  static const char* names[] = {"beta0", "beta1", "beta2"};
  std::ostringstream o;
  o << "term,estimate,std_error\n";
  for (int k = 0; k < 3; ++k) o << names[k] << ',' << num(m.beta[k]) << ',' << num(m.std_error[k]) << '\n';
  o << "sigma," << num(m.sigma) << ",nan\n";
  o << "samples," << m.sample_count << ",nan\n";
  return o.str();
}

std::vector<SlipMap> parse_states_csv(const std::string& text) {
  const auto rows = rows_of(text, kStatesHeader);
  std::map<std::size_t, std::vector<std::tuple<std::size_t, std::size_t, NodeState>>> by_frame;
  std::size_t nr = 0, nc = 0;
  for (const auto& r : rows) {
    NodeState s;
    if (r[3] == "stick") s = NodeState::Stick;
    else if (r[3] == "slip") s = NodeState::Slip;
    else if (r[3] == "non_contact") s = NodeState::NonContact;
    else throw FormatError("unknown state '" + r[3] + "'");
    const std::size_t i = to_size(r[1]), j = to_size(r[2]);
    nr = std::max(nr, i + 1);
    nc = std::max(nc, j + 1);
    by_frame[to_size(r[0])].emplace_back(i, j, s);
  }
  std::vector<SlipMap> out;
  for (auto& [frame, cells] : by_frame) {
    if (cells.size() != nr * nc) throw FormatError("frame " + std::to_string(frame) + " does not cover the grid");
    Grid<NodeState> g(nr, nc);
    for (auto& [i, j, s] : cells) g(i, j) = s;
    out.push_back(make_slip_map(frame, std::move(g)));
  }
  return out;
}

std::vector<detect::Event> parse_events_csv(const std::string& text) {
  std::vector<detect::Event> out;
  for (const auto& r : rows_of(text, kEventsHeader))
    out.push_back({to_size(r[0]), to_double(r[1]), to_size(r[2]), to_size(r[3]), detect::event_from_string(r[4]),
                   to_double(r[5]), to_double(r[6])});
  return out;
}

std::string line_plot_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                          const std::vector<Series>& series) {
  const double W = 640, H = 420, L = 60, R = 20, T = 40, B = 50;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      x0 = std::min(x0, s.x[k]);
      x1 = std::max(x1, s.x[k]);
      y0 = std::min(y0, s.y[k]);
      y1 = std::max(y1, s.y[k]);
    }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) y1 = y0 + 1.0;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel << "</text>\n";
  o << "<text x=\"16\" y=\"" << H / 2 << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 " << H / 2
    << ")\">" << ylabel << "</text>\n";
  o << "<text x=\"" << L << "\" y=\"" << H - B + 16 << "\" font-size=\"10\">" << num(x0) << "</text>\n";
  o << "<text x=\"" << W - R << "\" y=\"" << H - B + 16 << "\" font-size=\"10\" text-anchor=\"end\">" << num(x1) << "</text>\n";
  o << "<text x=\"" << L - 4 << "\" y=\"" << H - B << "\" font-size=\"10\" text-anchor=\"end\">" << num(y0) << "</text>\n";
  o << "<text x=\"" << L - 4 << "\" y=\"" << T + 4 << "\" font-size=\"10\" text-anchor=\"end\">" << num(y1) << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* c = colors[s % 6];
    o << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < series[s].x.size(); ++k) o << num(px(series[s].x[k])) << ',' << num(py(series[s].y[k])) << ' ';
    o << "\"/>\n";
    o << "<text x=\"" << W - R - 4 << "\" y=\"" << T + 14 * (s + 1) << "\" font-size=\"11\" text-anchor=\"end\" fill=\"" << c
      << "\">" << series[s].label << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw FormatError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace slipdet::io
