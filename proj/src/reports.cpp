#include "gridmodal/reports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "gridmodal/errors.hpp"

namespace gridmodal {

namespace {

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string svg_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::ofstream open_or_throw(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw GridError("CannotWrite: path=" + path);
  return f;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

const char* kind_name(BusKind k) {
  switch (k) {
    case BusKind::Slack: return "slack";
    case BusKind::PV: return "pv";
    case BusKind::PQ: return "pq";
  }
  return "pq";
}

struct Frame {
  double x0 = 70, x1 = 730, y0 = 40, y1 = 510;   // pixel box, y grows down
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1; // data window
  double sx(double x) const { return x0 + (x - xmin) / (xmax - xmin) * (x1 - x0); }
  double sy(double y) const { return y1 - (y - ymin) / (ymax - ymin) * (y1 - y0); }
};

void draw_axes(std::ostringstream& svg, const Frame& fr, const std::string& x_label,
               const std::string& y_label) {
  svg << "<rect x='" << svg_num(fr.x0) << "' y='" << svg_num(fr.y0) << "' width='"
      << svg_num(fr.x1 - fr.x0) << "' height='" << svg_num(fr.y1 - fr.y0)
      << "' fill='none' stroke='#444' stroke-width='1'/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = fr.xmin + (fr.xmax - fr.xmin) * i / 5.0;
    const double fy = fr.ymin + (fr.ymax - fr.ymin) * i / 5.0;
    svg << "<line x1='" << svg_num(fr.sx(fx)) << "' y1='" << svg_num(fr.y1) << "' x2='"
        << svg_num(fr.sx(fx)) << "' y2='" << svg_num(fr.y1 + 4)
        << "' stroke='#444' stroke-width='1'/>\n";
    svg << "<text x='" << svg_num(fr.sx(fx)) << "' y='" << svg_num(fr.y1 + 18)
        << "' font-family='sans-serif' font-size='11' text-anchor='middle'>"
        << tick_num(fx) << "</text>\n";
    svg << "<line x1='" << svg_num(fr.x0 - 4) << "' y1='" << svg_num(fr.sy(fy)) << "' x2='"
        << svg_num(fr.x0) << "' y2='" << svg_num(fr.sy(fy))
        << "' stroke='#444' stroke-width='1'/>\n";
    svg << "<text x='" << svg_num(fr.x0 - 8) << "' y='" << svg_num(fr.sy(fy) + 4)
        << "' font-family='sans-serif' font-size='11' text-anchor='end'>" << tick_num(fy)
        << "</text>\n";
  }
  svg << "<text x='" << svg_num((fr.x0 + fr.x1) / 2) << "' y='" << svg_num(fr.y1 + 38)
      << "' font-family='sans-serif' font-size='13' text-anchor='middle'>" << x_label
      << "</text>\n";
  svg << "<text x='16' y='" << svg_num((fr.y0 + fr.y1) / 2)
      << "' font-family='sans-serif' font-size='13' text-anchor='middle' transform='rotate(-90 16 "
      << svg_num((fr.y0 + fr.y1) / 2) << ")'>" << y_label << "</text>\n";
}

}  // namespace

void write_pf_csv(const std::string& path, const PowerSystemCase& sys,
                  const PowerFlowSolution& sol) {
  std::ofstream f = open_or_throw(path);
  f << "bus,name,kind,v_mag_pu,v_angle_deg,p_inj_mw,q_inj_mvar\n";
  for (size_t i = 0; i < sys.buses.size(); ++i) {
    const Bus& b = sys.buses[i];
    const int k = static_cast<int>(i);
    f << b.id << ',' << b.name << ',' << kind_name(b.kind) << ','
      << fmt_num(sol.v_mag[k]) << ',' << fmt_num(sol.v_ang[k] * 180.0 / M_PI) << ','
      << fmt_num(sol.p_inj[k] * sys.base.s_base) << ','
      << fmt_num(sol.q_inj[k] * sys.base.s_base) << '\n';
  }
}

void write_modal_csv(const std::string& path, const ModalResult& modal) {
  std::ofstream f = open_or_throw(path);
  f << "mode,re,im,freq_hz,damping_ratio,category,state_1,p_1,state_2,p_2\n";
  for (size_t m = 0; m < modal.modes.size(); ++m) {
    const Mode& mo = modal.modes[m];
    const auto label = [&](int idx) -> std::string {
      return idx >= 0 ? modal.labels[static_cast<size_t>(idx)] : "";
    };
    f << (m + 1) << ',' << fmt_num(mo.lambda.real()) << ',' << fmt_num(mo.lambda.imag())
      << ',' << fmt_num(mo.freq_hz) << ',' << fmt_num(mo.damping) << ','
      << to_string(mo.category) << ',' << label(mo.dominant_state_1) << ','
      << fmt_num(mo.p_1) << ',' << label(mo.dominant_state_2) << ',' << fmt_num(mo.p_2)
      << '\n';
  }
}

void write_timeseries_csv(const std::string& path, const TimeSeries& ts) {
  std::ofstream f = open_or_throw(path);
  f << 't';
  for (const auto& c : ts.columns) f << ',' << c;
  f << '\n';
  for (size_t s = 0; s < ts.t.size(); ++s) {
    f << fmt_num(ts.t[s]);
    for (const auto& col : ts.data) f << ',' << fmt_num(col[s]);
    f << '\n';
  }
}

void write_eigen_map_svg(const std::string& path, const ModalResult& modal) {
  Frame fr;
  double re_lo = 0.0, re_hi = 0.0, im_hi = 1.0;
  for (const Mode& m : modal.modes) {
    re_lo = std::min(re_lo, m.lambda.real());
    re_hi = std::max(re_hi, m.lambda.real());
    im_hi = std::max(im_hi, m.lambda.imag());
  }
  const double re_pad = 0.08 * std::max(re_hi - re_lo, 1e-3);
  fr.xmin = re_lo - re_pad;
  fr.xmax = std::max(re_hi + re_pad, 0.15 * (re_lo < 0 ? -re_lo : 1.0));
  fr.ymax = 1.08 * im_hi;
  fr.ymin = -fr.ymax;

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='760' height='560' "
         "viewBox='0 0 760 560'>\n";
  svg << "<rect width='760' height='560' fill='white'/>\n";
  // Shade the unstable half-plane and draw the imaginary axis.
  if (fr.xmax > 0.0) {
    const double zx = fr.sx(std::max(0.0, fr.xmin));
    svg << "<rect x='" << svg_num(zx) << "' y='" << svg_num(fr.y0) << "' width='"
        << svg_num(fr.x1 - zx) << "' height='" << svg_num(fr.y1 - fr.y0)
        << "' fill='#fbe9e7'/>\n";
    if (fr.xmin < 0.0)
      svg << "<line x1='" << svg_num(fr.sx(0)) << "' y1='" << svg_num(fr.y0) << "' x2='"
          << svg_num(fr.sx(0)) << "' y2='" << svg_num(fr.y1)
          << "' stroke='#b71c1c' stroke-width='1' stroke-dasharray='4 3'/>\n";
  }
  draw_axes(svg, fr, "Re(lambda) 1/s", "Im(lambda) rad/s");

  std::vector<size_t> osc;
  for (size_t m = 0; m < modal.modes.size(); ++m)
    if (modal.modes[m].lambda.imag() > 0.0) osc.push_back(m);
  std::sort(osc.begin(), osc.end(), [&](size_t a, size_t b) {
    return modal.modes[a].damping < modal.modes[b].damping;
  });
  const size_t n_label = std::min<size_t>(5, osc.size());

  for (const Mode& m : modal.modes) {
    const bool unstable = m.lambda.real() > 1e-8;
    const char* color = unstable ? "#d32f2f" : "#1565c0";
    svg << "<circle cx='" << svg_num(fr.sx(m.lambda.real())) << "' cy='"
        << svg_num(fr.sy(m.lambda.imag())) << "' r='4' fill='" << color << "'/>\n";
    if (m.lambda.imag() > 0.0)
      svg << "<circle cx='" << svg_num(fr.sx(m.lambda.real())) << "' cy='"
          << svg_num(fr.sy(-m.lambda.imag())) << "' r='4' fill='" << color
          << "' fill-opacity='0.45'/>\n";
  }
  for (size_t i = 0; i < n_label; ++i) {
    const Mode& m = modal.modes[osc[i]];
    char text[96];
    std::snprintf(text, sizeof text, "%.3g Hz, z=%.3g", m.freq_hz, m.damping);
    svg << "<text x='" << svg_num(fr.sx(m.lambda.real()) + 7) << "' y='"
        << svg_num(fr.sy(m.lambda.imag()) - 6)
        << "' font-family='sans-serif' font-size='11' fill='#333'>" << text
        << "</text>\n";
  }
  svg << "</svg>\n";

  std::ofstream f = open_or_throw(path);
  f << svg.str();
}

void write_timeseries_svg(const std::string& path, const TimeSeries& ts,
                          const std::string& quantity) {
  const std::string suffix = "." + quantity;
  std::vector<int> cols;
  for (size_t c = 0; c < ts.columns.size(); ++c)
    if (ts.columns[c].size() > suffix.size() &&
        ts.columns[c].compare(ts.columns[c].size() - suffix.size(), suffix.size(),
                              suffix) == 0)
      cols.push_back(static_cast<int>(c));
  if (cols.empty() || ts.t.empty()) throw UnknownTarget(quantity);

  Frame fr;
  fr.xmin = ts.t.front();
  fr.xmax = std::max(ts.t.back(), fr.xmin + 1e-9);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const int c : cols)
    for (const double v : ts.data[static_cast<size_t>(c)]) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  const double pad = std::max(0.05 * (hi - lo), 1e-9 * std::max(1.0, std::abs(hi)));
  fr.ymin = lo - pad;
  fr.ymax = hi + pad;

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='760' height='560' "
         "viewBox='0 0 760 560'>\n";
  svg << "<rect width='760' height='560' fill='white'/>\n";
  draw_axes(svg, fr, "t, s", quantity);
  svg << "<text x='" << svg_num((fr.x0 + fr.x1) / 2)
      << "' y='24' font-family='sans-serif' font-size='15' text-anchor='middle'>"
      << quantity << "</text>\n";

  for (size_t i = 0; i < cols.size(); ++i) {
    const auto& series = ts.data[static_cast<size_t>(cols[i])];
    const char* color = kPalette[i % kPaletteSize];
    svg << "<polyline fill='none' stroke='" << color << "' stroke-width='1.4' points='";
    for (size_t s = 0; s < ts.t.size(); ++s) {
      if (s) svg << ' ';
      svg << svg_num(fr.sx(ts.t[s])) << ',' << svg_num(fr.sy(series[s]));
    }
    svg << "'/>\n";
    const std::string& name = ts.columns[static_cast<size_t>(cols[i])];
    const double ly = fr.y0 + 16 + 16 * static_cast<double>(i);
    svg << "<rect x='" << svg_num(fr.x1 - 150) << "' y='" << svg_num(ly - 9)
        << "' width='10' height='10' fill='" << color << "'/>\n";
    svg << "<text x='" << svg_num(fr.x1 - 135) << "' y='" << svg_num(ly)
        << "' font-family='sans-serif' font-size='11'>"
        << name.substr(0, name.size() - suffix.size()) << "</text>\n";
  }
  svg << "</svg>\n";

  std::ofstream f = open_or_throw(path);
  f << svg.str();
}

void write_manifest(const std::string& path, const RunManifest& m) {
  std::ofstream f = open_or_throw(path);
  f << "{\n";
  f << "  \"tool\": \"" << json_escape(m.tool_version) << "\",\n";
  f << "  \"command\": \"" << json_escape(m.command) << "\",\n";
  f << "  \"case\": \"" << json_escape(m.case_path) << "\",\n";
  f << "  \"case_hash\": \"" << json_escape(m.case_hash) << "\",\n";
  f << "  \"options\": \"" << json_escape(m.options) << "\",\n";
  f << "  \"output_dir\": \"" << json_escape(m.output_dir) << "\"\n";
  f << "}\n";
}

std::string file_hash(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw GridError("CannotRead: path=" + path);
  std::uint64_t h = 14695981039346656037ULL;
  char buf[4096];
  while (f) {
    f.read(buf, sizeof buf);
    const std::streamsize got = f.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
  }
  char hex[24];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

}  // namespace gridmodal
