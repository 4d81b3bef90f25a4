#include "ppgm/cli/output.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ppgm/cli/config.h"

namespace ppgm::cli {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw NumericError("cannot write " + path);
  return out;
}

}  // namespace

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out = open_out(path);
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  if (!out) throw NumericError("failed writing " + path);
}

const std::vector<std::string>& history_header() {
  static const std::vector<std::string> h{"iter",     "delta_k",      "control_err", "value_err",
                                          "bsde_loss", "control_loss", "wall_ms"};
  return h;
}

void write_history(const std::string& path, const IterateHistory& history) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : history) {
    rows.push_back({std::to_string(r.k), format_number(r.deltaK), format_number(r.controlErr),
                    format_number(r.valueErr), format_number(r.bsdeLoss), format_number(r.controlLoss),
                    format_number(r.wallMillis)});
  }
  write_csv(path, history_header(), rows);
}

const std::vector<std::string>& value0_header() {
  static const std::vector<std::string> h{"x", "value", "stderr", "reference"};
  return h;
}

void write_value0(const std::string& path, const std::vector<Value0Row>& rows) {
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    cells.push_back({format_number(r.x), format_number(r.value), format_number(r.stdErr), format_number(r.reference)});
  }
  write_csv(path, value0_header(), cells);
}

void write_line_plot(const std::string& path, const std::string& title, const std::string& xLabel,
                     const std::vector<PlotSeries>& series, bool logY) {
  static const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  const double W = 640, H = 420, left = 70, right = 160, top = 40, bottom = 50;
  const double pw = W - left - right, ph = H - top - bottom;

  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  auto ty = [&](double y) { return logY ? std::log10(y) : y; };
  auto usable = [&](double y) { return std::isfinite(y) && (!logY || y > 0.0); };
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.y[i]) || !std::isfinite(s.x[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, ty(s.y[i]));
      ymax = std::max(ymax, ty(s.y[i]));
    }
  }
  if (!(xmin <= xmax)) xmin = 0, xmax = 1;
  if (!(ymin <= ymax)) ymin = 0, ymax = 1;
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return top + (1.0 - (ty(y) - ymin) / (ymax - ymin)) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << left << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n"
      << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = xmin + (xmax - xmin) * k / 4.0;
    const double fy = ymin + (ymax - ymin) * k / 4.0;
    const double gx = left + pw * k / 4.0;
    const double gy = top + ph * (1.0 - k / 4.0);
    svg << "<text x=\"" << gx << "\" y=\"" << top + ph + 16 << "\" font-family=\"sans-serif\" font-size=\"11\" "
        << "text-anchor=\"middle\">" << format_number(std::round(fx * 1000) / 1000) << "</text>\n";
    const double label = logY ? std::pow(10.0, fy) : fy;
    std::ostringstream lab;
    lab.precision(3);
    lab << label;
    svg << "<text x=\"" << left - 6 << "\" y=\"" << gy + 4 << "\" font-family=\"sans-serif\" font-size=\"11\" "
        << "text-anchor=\"end\">" << lab.str() << "</text>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << gy << "\" x2=\"" << left + pw << "\" y2=\"" << gy
        << "\" stroke=\"#ddd\"/>\n";
  }
  svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 12 << "\" font-family=\"sans-serif\" font-size=\"12\" "
      << "text-anchor=\"middle\">" << xLabel << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % 6];
    std::ostringstream pts;
    for (std::size_t i = 0; i < series[s].x.size() && i < series[s].y.size(); ++i) {
      if (!usable(series[s].y[i]) || !std::isfinite(series[s].x[i])) continue;
      pts << px(series[s].x[i]) << ',' << py(series[s].y[i]) << ' ';
    }
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << pts.str()
        << "\"/>\n";
    const double ly = top + 16 + 18 * static_cast<double>(s);
    svg << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 32 << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << left + pw + 38 << "\" y=\"" << ly + 4 << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << series[s].label << "</text>\n";
  }
  svg << "</svg>\n";
  std::ofstream out = open_out(path);
  out << svg.str();
}

nlohmann::json mlp_to_json(const nn::Mlp& net) {
  const Vector p = net.params();
  return nlohmann::json{{"dims", net.dims},
                        {"input_scale", std::vector<double>(net.inputScale.data(), net.inputScale.data() + net.inputScale.size())},
                        {"input_shift", std::vector<double>(net.inputShift.data(), net.inputShift.data() + net.inputShift.size())},
                        {"params", std::vector<double>(p.data(), p.data() + p.size())}};
}

nn::Mlp mlp_from_json(const nlohmann::json& j, const std::string& path) {
  try {
    const auto dims = j.at("dims").get<std::vector<Eigen::Index>>();
    nn::Mlp net = nn::mlp_init(dims, 0, 0.0);
    const auto scale = j.at("input_scale").get<std::vector<double>>();
    const auto shift = j.at("input_shift").get<std::vector<double>>();
    const auto params = j.at("params").get<std::vector<double>>();
    if (scale.size() != static_cast<std::size_t>(dims.front()) || shift.size() != scale.size()) {
      throw ConfigError(path, "input scaling does not match the input size");
    }
    net.inputScale = Eigen::Map<const Vector>(scale.data(), static_cast<Eigen::Index>(scale.size()));
    net.inputShift = Eigen::Map<const Vector>(shift.data(), static_cast<Eigen::Index>(shift.size()));
    if (params.size() != net.parameter_count()) throw ConfigError(path + ".params", "wrong parameter count");
    net.set_params(Eigen::Map<const Vector>(params.data(), static_cast<Eigen::Index>(params.size())));
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path, std::string("malformed network: ") + e.what());
  }
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open file");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path, std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace ppgm::cli
