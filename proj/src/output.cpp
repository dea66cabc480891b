#include "rotortrack/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rotortrack/errors.hpp"

namespace rotortrack {

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kConfig, "cannot write " + path.string());
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  return cells;
}

// Minimal SVG line-chart plumbing.
struct Frame {
  double x0, y0, w, h;  // pixel box
  double xmin, xmax, ymin, ymax;

  double px(double x) const { return x0 + (x - xmin) / (xmax - xmin) * w; }
  double py(double y) const { return y0 + h - (y - ymin) / (ymax - ymin) * h; }
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

void polyline(std::ostream& os, const Frame& f, const std::vector<double>& xs, const std::vector<double>& ys,
              const std::string& color, bool dashed) {
  os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
  if (dashed) os << " stroke-dasharray=\"6,4\"";
  os << " points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) os << fmt(f.px(xs[i]), 7) << ',' << fmt(f.py(ys[i]), 7) << ' ';
  os << "\"/>\n";
}

void axes(std::ostream& os, const Frame& f, const std::string& xlabel, const std::string& ylabel) {
  os << "<rect x=\"" << f.x0 << "\" y=\"" << f.y0 << "\" width=\"" << f.w << "\" height=\"" << f.h
     << "\" fill=\"none\" stroke=\"#444\"/>\n";
  os << "<text x=\"" << f.x0 << "\" y=\"" << f.y0 + f.h + 16 << "\" font-size=\"11\">" << fmt(f.xmin) << "</text>\n";
  os << "<text x=\"" << f.x0 + f.w << "\" y=\"" << f.y0 + f.h + 16
     << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(f.xmax) << "</text>\n";
  os << "<text x=\"" << f.x0 - 4 << "\" y=\"" << f.y0 + 10 << "\" font-size=\"11\" text-anchor=\"end\">"
     << fmt(f.ymax) << "</text>\n";
  os << "<text x=\"" << f.x0 - 4 << "\" y=\"" << f.y0 + f.h << "\" font-size=\"11\" text-anchor=\"end\">"
     << fmt(f.ymin) << "</text>\n";
  os << "<text x=\"" << f.x0 + f.w / 2 << "\" y=\"" << f.y0 + f.h + 30
     << "\" font-size=\"12\" text-anchor=\"middle\">" << xlabel << "</text>\n";
  os << "<text x=\"" << f.x0 + 6 << "\" y=\"" << f.y0 + 16 << "\" font-size=\"12\">" << ylabel << "</text>\n";
}

std::pair<double, double> padded_range(std::initializer_list<const std::vector<double>*> series) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto* s : series) {
    for (double v : *s) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

void unit_disk_frame(std::ostream& os, const Frame& f) {
  os << "<circle cx=\"" << f.px(0) << "\" cy=\"" << f.py(0) << "\" r=\"" << f.w / (f.xmax - f.xmin)
     << "\" fill=\"none\" stroke=\"#888\"/>\n";
  os << "<line x1=\"" << f.px(-1) << "\" y1=\"" << f.py(0) << "\" x2=\"" << f.px(1) << "\" y2=\"" << f.py(0)
     << "\" stroke=\"#ddd\"/>\n";
  os << "<line x1=\"" << f.px(0) << "\" y1=\"" << f.py(-1) << "\" x2=\"" << f.px(0) << "\" y2=\"" << f.py(1)
     << "\" stroke=\"#ddd\"/>\n";
  os << "<text x=\"" << f.x0 + f.w / 2 << "\" y=\"" << f.y0 + f.h + 24
     << "\" font-size=\"12\" text-anchor=\"middle\">&lt;cos&gt;</text>\n";
  os << "<text x=\"" << f.x0 - 8 << "\" y=\"" << f.y0 + f.h / 2
     << "\" font-size=\"12\" text-anchor=\"end\">&lt;sin&gt;</text>\n";
}

void svg_open(std::ostream& os, int w, int h) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
     << ' ' << h << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

}  // namespace

void write_record_csv(const std::filesystem::path& path, const SimulationRecord& record, const UnitSystem& units) {
  std::ofstream out = open_out(path);
  out << "t,t_ps,eps_x,eps_y,ox,oy,ox_d,oy_d,D,margin,norm";
  for (int m : record.basis.m_values()) out << ",pop_m" << m;
  out << '\n';
  for (const RecordSample& s : record.samples) {
    out << format_double(s.t) << ',' << format_double(units.to_ps(s.t)) << ',' << format_double(s.field.eps_x) << ','
        << format_double(s.field.eps_y) << ',' << format_double(s.ox) << ',' << format_double(s.oy) << ','
        << format_double(s.ox_d) << ',' << format_double(s.oy_d) << ',' << format_double(s.determinant) << ','
        << format_double(s.margin) << ',' << format_double(s.norm);
    for (double p : s.populations) out << ',' << format_double(p);
    out << '\n';
  }
}

void write_fields_csv(const std::filesystem::path& path, std::span<const FieldSample> fields) {
  std::ofstream out = open_out(path);
  out << "t,eps_x,eps_y\n";
  for (const FieldSample& f : fields) {
    out << format_double(f.t) << ',' << format_double(f.eps_x) << ',' << format_double(f.eps_y) << '\n';
  }
}

std::vector<FieldSample> read_fields_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataFormatError("cannot open fields file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataFormatError(path.string() + ": empty file");
  const std::vector<std::string> header = split_csv(line);
  int it = -1, ix = -1, iy = -1;
  for (int i = 0; i < static_cast<int>(header.size()); ++i) {
    if (header[i] == "t") it = i;
    if (header[i] == "eps_x") ix = i;
    if (header[i] == "eps_y") iy = i;
  }
  if (it < 0 || ix < 0 || iy < 0) throw DataFormatError(path.string() + ": header must contain t, eps_x, eps_y");
  const std::size_t needed = static_cast<std::size_t>(std::max({it, ix, iy})) + 1;

  std::vector<FieldSample> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> cells = split_csv(line);
    if (cells.size() < needed) {
      throw DataFormatError(path.string() + ":" + std::to_string(line_no) + ": missing columns");
    }
    FieldSample f;
    double* targets[3] = {&f.t, &f.eps_x, &f.eps_y};
    const int cols[3] = {it, ix, iy};
    for (int k = 0; k < 3; ++k) {
      const std::string& c = cells[cols[k]];
      const auto res = std::from_chars(c.data(), c.data() + c.size(), *targets[k]);
      if (res.ec != std::errc() || res.ptr != c.data() + c.size()) {
        throw DataFormatError(path.string() + ":" + std::to_string(line_no) + ": cannot parse \"" + c + "\"");
      }
    }
    out.push_back(f);
  }
  return out;
}

void write_study_csv(const std::filesystem::path& path, std::span<const StudyCell> cells) {
  std::ofstream out = open_out(path);
  out << "dt,M,status,max_deviation,runtime_s,message\n";
  for (const StudyCell& c : cells) {
    std::string msg = c.message;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    out << format_double(c.dt) << ',' << c.cutoff << ',' << c.status << ','
        << (c.ok() ? format_double(c.max_deviation) : std::string()) << ',' << format_double(c.runtime_s) << ','
        << msg << '\n';
  }
}

void write_track_preview_csv(const std::filesystem::path& path, const Track& track, int samples) {
  std::ofstream out = open_out(path);
  out << "t,x_d,y_d,d2x_d,d2y_d,radius\n";
  for (int i = 0; i < samples; ++i) {
    const double t = track.duration() * i / (samples - 1);
    const TrackSample s = track.sample(t);
    out << format_double(t) << ',' << format_double(s.x_d) << ',' << format_double(s.y_d) << ','
        << format_double(s.d2x_d) << ',' << format_double(s.d2y_d) << ','
        << format_double(std::hypot(s.x_d, s.y_d)) << '\n';
  }
}

void write_traces_svg(const std::filesystem::path& path, const SimulationRecord& record) {
  std::vector<double> t, ox, oy, oxd, oyd, ex, ey;
  for (const RecordSample& s : record.samples) {
    t.push_back(s.t);
    ox.push_back(s.ox);
    oy.push_back(s.oy);
    oxd.push_back(s.ox_d);
    oyd.push_back(s.oy_d);
    ex.push_back(s.field.eps_x);
    ey.push_back(s.field.eps_y);
  }
  if (t.size() < 2) return;
  std::ofstream out = open_out(path);
  svg_open(out, 860, 620);
  const auto [olo, ohi] = padded_range({&ox, &oy, &oxd, &oyd});
  const Frame top{70, 20, 760, 240, t.front(), t.back(), olo, ohi};
  axes(out, top, "t (hbar/B)", "orientation: &lt;cos&gt; blue, &lt;sin&gt; red, designated dashed");
  if (record.has_designated) {
    polyline(out, top, t, oxd, "#9ab", true);
    polyline(out, top, t, oyd, "#dab", true);
  }
  polyline(out, top, t, ox, "#1f5fbf", false);
  polyline(out, top, t, oy, "#c0392b", false);

  const auto [flo, fhi] = padded_range({&ex, &ey});
  const Frame bottom{70, 330, 760, 240, t.front(), t.back(), flo, fhi};
  axes(out, bottom, "t (hbar/B)", "fields (B/mu): eps_x blue, eps_y red");
  polyline(out, bottom, t, ex, "#1f5fbf", false);
  polyline(out, bottom, t, ey, "#c0392b", false);
  out << "</svg>\n";
}

void write_plane_svg(const std::filesystem::path& path, const SimulationRecord& record) {
  std::vector<double> ox, oy, oxd, oyd;
  for (const RecordSample& s : record.samples) {
    ox.push_back(s.ox);
    oy.push_back(s.oy);
    oxd.push_back(s.ox_d);
    oyd.push_back(s.oy_d);
  }
  std::ofstream out = open_out(path);
  svg_open(out, 540, 540);
  const Frame f{40, 20, 480, 480, -1.05, 1.05, -1.05, 1.05};
  unit_disk_frame(out, f);
  if (record.has_designated) polyline(out, f, oxd, oyd, "#999", true);
  polyline(out, f, ox, oy, "#1f5fbf", false);
  out << "</svg>\n";
}

void write_track_plane_svg(const std::filesystem::path& path, const Track& track, int samples) {
  std::vector<double> xs, ys;
  for (int i = 0; i < samples; ++i) {
    const TrackPoint p = track.value(track.duration() * i / (samples - 1));
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  std::ofstream out = open_out(path);
  svg_open(out, 540, 540);
  const Frame f{40, 20, 480, 480, -1.05, 1.05, -1.05, 1.05};
  unit_disk_frame(out, f);
  polyline(out, f, xs, ys, "#1f5fbf", false);
  out << "</svg>\n";
}

void write_populations_svg(const std::filesystem::path& path, const SimulationRecord& record) {
  const std::size_t n = record.samples.size();
  if (n < 2) return;
  const int dim = record.basis.dim();
  const std::size_t cols = std::min<std::size_t>(n, 400);
  std::ofstream out = open_out(path);
  svg_open(out, 860, 120 + 12 * dim);
  const double x0 = 70, y0 = 20, w = 760, cell_h = 12;
  const double cell_w = w / static_cast<double>(cols);
  for (std::size_t c = 0; c < cols; ++c) {
    const RecordSample& s = record.samples[c * (n - 1) / std::max<std::size_t>(cols - 1, 1)];
    for (int i = 0; i < dim; ++i) {
      // log10 population mapped from [-6, 0] onto white..dark blue
      const double lp = std::clamp(std::log10(std::max(s.populations[i], 1e-300)), -6.0, 0.0);
      const double u = (lp + 6.0) / 6.0;
      const int r = static_cast<int>(255 * (1 - u) + 8 * u);
      const int g = static_cast<int>(255 * (1 - u) + 48 * u);
      const int b = static_cast<int>(255 * (1 - u) + 107 * u);
      out << "<rect x=\"" << fmt(x0 + c * cell_w, 7) << "\" y=\"" << y0 + (dim - 1 - i) * cell_h << "\" width=\""
          << fmt(cell_w + 0.5, 5) << "\" height=\"" << cell_h << "\" fill=\"rgb(" << r << ',' << g << ',' << b
          << ")\"/>\n";
    }
  }
  const int big_m = record.basis.cutoff();
  out << "<text x=\"" << x0 - 4 << "\" y=\"" << y0 + 10 << "\" font-size=\"11\" text-anchor=\"end\">m=" << big_m
      << "</text>\n";
  out << "<text x=\"" << x0 - 4 << "\" y=\"" << y0 + dim * cell_h << "\" font-size=\"11\" text-anchor=\"end\">m="
      << -big_m << "</text>\n";
  out << "<text x=\"" << x0 << "\" y=\"" << y0 + dim * cell_h + 16 << "\" font-size=\"11\">t="
      << fmt(record.samples.front().t) << "</text>\n";
  out << "<text x=\"" << x0 + w << "\" y=\"" << y0 + dim * cell_h + 16
      << "\" font-size=\"11\" text-anchor=\"end\">t=" << fmt(record.samples.back().t) << "</text>\n";
  out << "<text x=\"" << x0 + w / 2 << "\" y=\"" << y0 + dim * cell_h + 34
      << "\" font-size=\"12\" text-anchor=\"middle\">populations |c_m|^2, log scale 1e-6 (white) to 1 (blue)</text>\n";
  out << "</svg>\n";
}

void write_frames(const std::filesystem::path& dir, const SimulationRecord& record, int count) {
  std::filesystem::create_directories(dir);
  const std::size_t n = record.samples.size();
  if (n == 0) return;
  const std::size_t frames = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(count, 1)));
  for (std::size_t k = 0; k < frames; ++k) {
    const std::size_t idx = frames == 1 ? n - 1 : k * (n - 1) / (frames - 1);
    const RecordSample& s = record.samples[idx];
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%05zu.csv", k);
    std::ofstream out = open_out(dir / name);
    out << "t,ox,oy,ox_d,oy_d\n"
        << format_double(s.t) << ',' << format_double(s.ox) << ',' << format_double(s.oy) << ','
        << format_double(s.ox_d) << ',' << format_double(s.oy_d) << '\n';
  }
}

}  // namespace rotortrack
