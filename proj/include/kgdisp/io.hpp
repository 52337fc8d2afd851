// io.hpp — CSV/JSON/SVG artifact emission. Every artifact carries the config
// hash; doubles print as %.17g so identical runs are byte-identical.
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kgdisp/common.hpp"
#include "kgdisp/decay.hpp"

namespace kgdisp {

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hash_hex(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string fmt_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct CsvWriter {
  std::ofstream out;
  CsvWriter(const std::string& path, const std::string& config_hash, const std::string& header) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    out.open(path);
    if (!out) throw std::runtime_error("CsvWriter: cannot open " + path);
    out << "# config " << config_hash << "\n" << header << "\n";
  }
  void row(const std::vector<double>& vals) {
    for (std::size_t i = 0; i < vals.size(); ++i) out << (i ? "," : "") << fmt_g17(vals[i]);
    out << "\n";
  }
};

inline void write_decay_csv(const DecayTable& t, const std::string& path, const std::string& hash) {
  CsvWriter w(path, hash, "t,norm,sigma,label");
  for (std::size_t i = 0; i < t.times.size(); ++i) {
    w.out << fmt_g17(t.times[i]) << "," << fmt_g17(t.norms[i]) << "," << fmt_g17(t.sigma) << ","
          << t.label << "\n";
  }
}

// ---- minimal self-contained SVG plots -------------------------------------------

namespace detail {

struct PlotFrame {
  double x0, x1, y0, y1;           // data range
  double px0 = 70, px1 = 760, py0 = 540, py1 = 40;  // pixel box (y inverted)
  bool logx = false, logy = false;

  double X(double x) const {
    double u = logx ? std::log10(x) : x;
    double u0 = logx ? std::log10(x0) : x0, u1 = logx ? std::log10(x1) : x1;
    return px0 + (u - u0) / (u1 - u0) * (px1 - px0);
  }
  double Y(double y) const {
    double u = logy ? std::log10(y) : y;
    double u0 = logy ? std::log10(y0) : y0, u1 = logy ? std::log10(y1) : y1;
    return py0 + (u - u0) / (u1 - u0) * (py1 - py0);
  }
};

inline void svg_header(std::ostream& o, const std::string& title, const std::string& hash) {
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
       "viewBox=\"0 0 800 600\">\n<!-- config "
    << hash << " -->\n<rect width=\"800\" height=\"600\" fill=\"white\"/>\n"
    << "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"15\">"
    << title << "</text>\n";
}

inline void svg_axes(std::ostream& o, const PlotFrame& f) {
  o << "<rect x=\"" << f.px0 << "\" y=\"" << f.py1 << "\" width=\"" << (f.px1 - f.px0)
    << "\" height=\"" << (f.py0 - f.py1) << "\" fill=\"none\" stroke=\"black\"/>\n";
  auto ticks = [&](bool xaxis) {
    bool lg = xaxis ? f.logx : f.logy;
    double a = xaxis ? f.x0 : f.y0, b = xaxis ? f.x1 : f.y1;
    std::vector<double> tk;
    if (lg) {
      for (int d = int(std::floor(std::log10(a))); d <= int(std::ceil(std::log10(b))); ++d)
        tk.push_back(std::pow(10.0, d));
    } else {
      for (int i = 0; i <= 5; ++i) tk.push_back(a + (b - a) * i / 5.0);
    }
    for (double t : tk) {
      if (t < a * (lg ? 0.999 : 1) - (lg ? 0 : 1e-12) || t > b * 1.001) continue;
      if (xaxis) {
        double px = f.X(t);
        o << "<line x1=\"" << px << "\" y1=\"" << f.py0 << "\" x2=\"" << px << "\" y2=\"" << (f.py0 + 5)
          << "\" stroke=\"black\"/>\n<text x=\"" << px << "\" y=\"" << (f.py0 + 20)
          << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"monospace\">" << fmt_g17(t).substr(0, 8)
          << "</text>\n";
      } else {
        double py = f.Y(t);
        o << "<line x1=\"" << (f.px0 - 5) << "\" y1=\"" << py << "\" x2=\"" << f.px0 << "\" y2=\"" << py
          << "\" stroke=\"black\"/>\n<text x=\"" << (f.px0 - 8) << "\" y=\"" << (py + 4)
          << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"monospace\">" << fmt_g17(t).substr(0, 8)
          << "</text>\n";
      }
    }
  };
  ticks(true);
  ticks(false);
}

inline void svg_polyline(std::ostream& o, const PlotFrame& f, const std::vector<double>& xs,
                         const std::vector<double>& ys, const std::string& color) {
  o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) o << f.X(xs[i]) << "," << f.Y(ys[i]) << " ";
  o << "\"/>\n";
}

}  // namespace detail

// kind "loglog": columns (t, value); draws points and a reference t^{-3/2} line.
inline void svg_loglog(const std::vector<double>& t, const std::vector<double>& val,
                       const std::string& path, const std::string& title, const std::string& hash,
                       double ref_slope = -1.5) {
  if (t.empty()) throw invalid_input("svg_loglog: empty data");
  detail::PlotFrame f;
  f.logx = f.logy = true;
  f.x0 = *std::min_element(t.begin(), t.end());
  f.x1 = *std::max_element(t.begin(), t.end());
  f.y0 = *std::min_element(val.begin(), val.end());
  f.y1 = *std::max_element(val.begin(), val.end());
  for (double v : val)
    if (!(v > 0)) throw invalid_input("svg_loglog: values must be positive");
  if (f.y0 == f.y1) {
    f.y0 *= 0.5;
    f.y1 *= 2.0;
  }
  std::filesystem::path pp(path);
  if (pp.has_parent_path()) std::filesystem::create_directories(pp.parent_path());
  std::ofstream o(path);
  detail::svg_header(o, title, hash);
  detail::svg_axes(o, f);
  detail::svg_polyline(o, f, t, val, "#1f77b4");
  for (std::size_t i = 0; i < t.size(); ++i)
    o << "<circle cx=\"" << f.X(t[i]) << "\" cy=\"" << f.Y(val[i]) << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
  // reference line through the first point
  double c = val.front() / std::pow(t.front(), ref_slope);
  std::vector<double> rx = {f.x0, f.x1};
  std::vector<double> ry = {c * std::pow(f.x0, ref_slope), c * std::pow(f.x1, ref_slope)};
  detail::svg_polyline(o, f, rx, ry, "#d62728");
  o << "<text x=\"740\" y=\"60\" text-anchor=\"end\" font-size=\"12\" font-family=\"monospace\" "
       "fill=\"#d62728\">slope "
    << ref_slope << "</text>\n</svg>\n";
}

// kind "field": columns (x, series...); linear axes.
inline void svg_field(const std::vector<double>& x, const std::vector<std::vector<double>>& series,
                      const std::string& path, const std::string& title, const std::string& hash) {
  if (x.empty() || series.empty()) throw invalid_input("svg_field: empty data");
  detail::PlotFrame f;
  f.x0 = x.front();
  f.x1 = x.back();
  f.y0 = 1e300;
  f.y1 = -1e300;
  for (const auto& s : series)
    for (double v : s) {
      f.y0 = std::min(f.y0, v);
      f.y1 = std::max(f.y1, v);
    }
  if (f.y0 == f.y1) {
    f.y0 -= 1;
    f.y1 += 1;
  }
  std::filesystem::path pp(path);
  if (pp.has_parent_path()) std::filesystem::create_directories(pp.parent_path());
  std::ofstream o(path);
  detail::svg_header(o, title, hash);
  detail::svg_axes(o, f);
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  for (std::size_t s = 0; s < series.size(); ++s)
    detail::svg_polyline(o, f, x, series[s], colors[s % 4]);
  o << "</svg>\n";
}

// kind "sweep": columns (x, y) on log-log axes, no reference line.
inline void svg_sweep(const std::vector<double>& x, const std::vector<double>& y,
                      const std::string& path, const std::string& title, const std::string& hash) {
  if (x.empty()) throw invalid_input("svg_sweep: empty data");
  for (double v : y)
    if (!(v > 0)) throw invalid_input("svg_sweep: values must be positive");
  for (double v : x)
    if (!(v > 0)) throw invalid_input("svg_sweep: abscissae must be positive");
  detail::PlotFrame f;
  f.logx = f.logy = true;
  f.x0 = *std::min_element(x.begin(), x.end());
  f.x1 = *std::max_element(x.begin(), x.end());
  f.y0 = *std::min_element(y.begin(), y.end());
  f.y1 = *std::max_element(y.begin(), y.end());
  if (f.y0 == f.y1) {
    f.y0 *= 0.5;
    f.y1 *= 2.0;
  }
  std::filesystem::path pp(path);
  if (pp.has_parent_path()) std::filesystem::create_directories(pp.parent_path());
  std::ofstream o(path);
  detail::svg_header(o, title, hash);
  detail::svg_axes(o, f);
  detail::svg_polyline(o, f, x, y, "#1f77b4");
  for (std::size_t i = 0; i < x.size(); ++i)
    o << "<circle cx=\"" << f.X(x[i]) << "\" cy=\"" << f.Y(y[i]) << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
  o << "</svg>\n";
}

}  // namespace kgdisp
