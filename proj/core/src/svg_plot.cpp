#include "mecsim/svg_plot.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "mecsim/harness.hpp"

namespace mecsim {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c",
                                    "#d62728", "#9467bd", "#8c564b"};
constexpr int kPaletteSize = 6;

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kPlotLeft = 62.0;
constexpr double kPlotRight = 470.0;
constexpr double kPlotTop = 24.0;
constexpr double kPlotBottom = 372.0;

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else {
      field += c;
    }
  }
  out.push_back(field);
  return out;
}

double parse_double(const std::string& s, int line_no) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end == nullptr || *end != '\0') {
    throw std::runtime_error("metrics csv line " + std::to_string(line_no) +
                             ": cannot parse number '" + s + "'");
  }
  return v;
}

struct PlotRow {
  std::string sweep_var;
  double sweep_value = 0.0;
  std::string policy;
  double metric[3] = {0.0, 0.0, 0.0};
};

std::vector<PlotRow> parse_metrics_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  std::vector<PlotRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    if (line_no == 1) {
      if (line != metrics_csv_header()) {
        throw std::runtime_error("metrics csv line 1: unexpected header");
      }
      continue;
    }
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 10) {
      throw std::runtime_error("metrics csv line " + std::to_string(line_no) +
                               ": expected 10 fields, found " + std::to_string(f.size()));
    }
    PlotRow row;
    row.sweep_var = f[0];
    row.sweep_value = parse_double(f[1], line_no);
    row.policy = f[2];
    row.metric[0] = parse_double(f[4], line_no);  // total_time_pct
    row.metric[1] = parse_double(f[5], line_no);  // mmtc_energy_pct
    row.metric[2] = parse_double(f[6], line_no);  // urllc_time_pct
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw std::runtime_error("metrics csv holds no data rows");
  }
  return rows;
}

double map_x(double v, double lo, double hi) {
  return kPlotLeft + (v - lo) / (hi - lo) * (kPlotRight - kPlotLeft);
}

double map_y(double v, double lo, double hi) {
  return kPlotBottom - (v - lo) / (hi - lo) * (kPlotBottom - kPlotTop);
}

void pad_range(double& lo, double& hi) {
  if (lo == hi) {
    lo -= 1.0;
    hi += 1.0;
    return;
  }
  const double pad = (hi - lo) * 0.05;
  lo -= pad;
  hi += pad;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render_chart(const std::vector<PlotRow>& rows, int metric_index,
                         const std::string& metric_name) {
  double x_lo = rows.front().sweep_value, x_hi = x_lo;
  double y_lo = rows.front().metric[metric_index], y_hi = y_lo;
  for (const PlotRow& r : rows) {
    x_lo = std::min(x_lo, r.sweep_value);
    x_hi = std::max(x_hi, r.sweep_value);
    y_lo = std::min(y_lo, r.metric[metric_index]);
    y_hi = std::max(y_hi, r.metric[metric_index]);
  }
  pad_range(x_lo, x_hi);
  pad_range(y_lo, y_hi);

  // Series keyed by policy; the rows are already sorted by (policy, value).
  std::vector<std::string> order;
  std::map<std::string, std::vector<const PlotRow*>> series;
  for (const PlotRow& r : rows) {
    auto [it, inserted] = series.try_emplace(r.policy);
    if (inserted) {
      order.push_back(r.policy);
    }
    it->second.push_back(&r);
  }

  std::string x_label = rows.front().sweep_var;
  for (const PlotRow& r : rows) {
    if (r.sweep_var != x_label) {
      x_label = "sweep value";
      break;
    }
  }

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
     << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth) << " " << num(kHeight) << "\">\n";
  os << "<rect width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
     << "\" fill=\"#ffffff\"/>\n";
  os << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#222222\">\n";

  for (int i = 0; i < 5; ++i) {
    const double fx = x_lo + (x_hi - x_lo) * i / 4.0;
    const double fy = y_lo + (y_hi - y_lo) * i / 4.0;
    const double px = map_x(fx, x_lo, x_hi);
    const double py = map_y(fy, y_lo, y_hi);
    os << "<line x1=\"" << num(px) << "\" y1=\"" << num(kPlotTop) << "\" x2=\"" << num(px)
       << "\" y2=\"" << num(kPlotBottom) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    os << "<line x1=\"" << num(kPlotLeft) << "\" y1=\"" << num(py) << "\" x2=\""
       << num(kPlotRight) << "\" y2=\"" << num(py)
       << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << num(px) << "\" y=\"" << num(kPlotBottom + 18.0)
       << "\" text-anchor=\"middle\">" << xml_escape(tick_label(fx)) << "</text>\n";
    os << "<text x=\"" << num(kPlotLeft - 8.0) << "\" y=\"" << num(py + 4.0)
       << "\" text-anchor=\"end\">" << xml_escape(tick_label(fy)) << "</text>\n";
  }

  os << "<rect x=\"" << num(kPlotLeft) << "\" y=\"" << num(kPlotTop) << "\" width=\""
     << num(kPlotRight - kPlotLeft) << "\" height=\"" << num(kPlotBottom - kPlotTop)
     << "\" fill=\"none\" stroke=\"#222222\" stroke-width=\"1\"/>\n";
  os << "<text x=\"" << num((kPlotLeft + kPlotRight) / 2.0) << "\" y=\""
     << num(kHeight - 8.0) << "\" text-anchor=\"middle\">" << xml_escape(x_label)
     << "</text>\n";
  os << "<text x=\"14\" y=\"" << num((kPlotTop + kPlotBottom) / 2.0)
     << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
     << num((kPlotTop + kPlotBottom) / 2.0) << ")\">" << xml_escape(metric_name)
     << "</text>\n";

  for (std::size_t s = 0; s < order.size(); ++s) {
    const std::string& policy = order[s];
    const char* color = kPalette[s % kPaletteSize];
    const std::vector<const PlotRow*>& pts = series[policy];
    if (pts.size() > 1) {
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i > 0) {
          os << ' ';
        }
        os << num(map_x(pts[i]->sweep_value, x_lo, x_hi)) << ','
           << num(map_y(pts[i]->metric[metric_index], y_lo, y_hi));
      }
      os << "\"/>\n";
    }
    for (const PlotRow* p : pts) {
      os << "<circle cx=\"" << num(map_x(p->sweep_value, x_lo, x_hi)) << "\" cy=\""
         << num(map_y(p->metric[metric_index], y_lo, y_hi)) << "\" r=\"3\" fill=\"" << color
         << "\"/>\n";
    }
    const double ly = kPlotTop + 10.0 + 18.0 * static_cast<double>(s);
    os << "<line x1=\"" << num(kPlotRight + 12.0) << "\" y1=\"" << num(ly) << "\" x2=\""
       << num(kPlotRight + 34.0) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << num(kPlotRight + 40.0) << "\" y=\"" << num(ly + 4.0) << "\">"
       << xml_escape(policy) << "</text>\n";
  }

  os << "</g>\n</svg>\n";
  return std::move(os).str();
}

}  // namespace

std::vector<std::string> render_plots(const std::string& csv_text, const std::string& out_dir) {
  std::vector<PlotRow> rows = parse_metrics_csv(csv_text);
  std::sort(rows.begin(), rows.end(), [](const PlotRow& a, const PlotRow& b) {
    if (a.policy != b.policy) {
      return a.policy < b.policy;
    }
    return a.sweep_value < b.sweep_value;
  });

  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const char* names[3] = {"total_time_pct", "mmtc_energy_pct", "urllc_time_pct"};
  std::vector<std::string> written;
  for (int m = 0; m < 3; ++m) {
    const std::string path = (fs::path(out_dir) / (std::string(names[m]) + ".svg")).string();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot write plot file: " + path);
    }
    out << render_chart(rows, m, names[m]);
    if (!out) {
      throw std::runtime_error("write failed: " + path);
    }
    written.push_back(path);
  }
  return written;
}

}  // namespace mecsim
