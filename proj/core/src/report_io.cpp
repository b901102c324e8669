#include "spsolve/report_io.hpp"

#include "spsolve/diagnostics.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace spsolve {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_profile_csv(const std::string& path, const Field& u, const Field& phi) {
  if (u.size() == 0)
    throw std::invalid_argument("write_profile_csv: zero-length profile");
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("write_profile_csv: cannot open '" + path + "'");
  out << "r,u,phi\n";
  for (std::size_t i = 0; i < u.size(); ++i)
    out << format_double(u.grid->r[i]) << ',' << format_double(u[i]) << ','
        << format_double(phi[i]) << '\n';
}

ProfileData read_profile_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("read_profile_csv: cannot open '" + path + "'");
  ProfileData d;
  std::string line;
  std::getline(in, line); // header
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    double r, u, phi;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &r, &u, &phi) != 3)
      throw std::runtime_error("read_profile_csv: malformed row '" + line + "'");
    d.r.push_back(r);
    d.u.push_back(u);
    d.phi.push_back(phi);
  }
  return d;
}

void write_report_json(const std::string& path, const RunConfig& cfg,
                       const SolveReport& rep) {
  nlohmann::json j;
  j["mode"] = mode_name(cfg.mode);
  j["problem"] = {{"dim", cfg.problem.dim},
                  {"q", cfg.problem.q},
                  {"lambda", cfg.problem.lambda},
                  {"mu", cfg.problem.mu}};
  j["level"] = rep.level;
  j["grad_residual"] = rep.grad_residual;
  j["nehari_residual"] = rep.nehari_residual;
  j["pohozaev_residual"] = rep.pohozaev_residual;
  if (rep.j_residual)
    j["j_residual"] = *rep.j_residual;
  else
    j["j_residual"] = nullptr;
  j["iterations"] = rep.iterations;
  j["converged"] = rep.converged;
  j["alpha_proxy"] = rep.alpha_proxy;
  j["ps_witness_gap"] = rep.ps_witness_gap;
  auto& trace = j["c_mu_trace"] = nlohmann::json::array();
  for (const auto& [mu, level] : rep.c_mu_trace)
    trace.push_back({{"mu", mu}, {"level", level}});

  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("write_report_json: cannot open '" + path + "'");
  out << j.dump(2) << '\n';
}

void write_constants_json(const std::string& path, const ConstantsReport& rep) {
  nlohmann::json j;
  j["sobolev_S"] = rep.sobolev_S;
  j["s_q1"] = rep.s_q1;
  j["s_lambda"] = rep.s_lambda;
  j["lambda1"] = rep.lambda1;
  j["cbar"] = rep.cbar_level;
  j["Cbar"] = rep.Cbar;
  if (rep.alpha)
    j["alpha"] = *rep.alpha;
  else
    j["alpha"] = nullptr;
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("write_constants_json: cannot open '" + path + "'");
  out << j.dump(2) << '\n';
}

double read_report_level(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("read_report_level: cannot open '" + path + "'");
  nlohmann::json j;
  in >> j;
  return j.at("level").get<double>();
}

void write_sweep_csv(const std::string& path, const std::string& axis,
                     const std::vector<SweepRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("write_sweep_csv: cannot open '" + path + "'");
  out << axis << ",level,grad_residual,nehari_residual,pohozaev_residual,converged\n";
  for (const auto& r : rows)
    out << format_double(r.value) << ',' << format_double(r.level) << ','
        << format_double(r.grad_residual) << ','
        << format_double(r.nehari_residual) << ','
        << format_double(r.pohozaev_residual) << ','
        << (r.converged ? "true" : "false") << '\n';
}

//==============================================================================
namespace {

std::string svg_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

} // namespace

void write_svg_chart(const std::string& path, const std::string& title,
                     const std::vector<SvgSeries>& series) {
  if (series.empty())
    throw std::invalid_argument("write_svg_chart: no series");
  for (const auto& s : series)
    if (s.x.empty() || s.x.size() != s.y.size())
      throw std::invalid_argument("write_svg_chart: empty or ragged series");

  constexpr int W = 800, H = 600;
  constexpr double ml = 70, mr = 20, mt = 40, mb = 50;

  double xmin = series[0].x[0], xmax = xmin, ymin = series[0].y[0], ymax = ymin;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (xmax == xmin)
    xmax = xmin + 1.0;
  if (ymax == ymin)
    ymax = ymin + 1.0;

  auto px = [&](double x) {
    return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr);
  };
  auto py = [&](double y) {
    return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb);
  };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
  out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"monospace\" font-size=\"16\">" << title << "</text>\n";

  // axes and 5 ticks per axis
  out << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr
      << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double fx = xmin + (xmax - xmin) * t / 4.0;
    const double fy = ymin + (ymax - ymin) * t / 4.0;
    out << "<text x=\"" << svg_num(px(fx)) << "\" y=\"" << H - mb + 20
        << "\" text-anchor=\"middle\" font-family=\"monospace\" "
           "font-size=\"11\">" << svg_num(fx) << "</text>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << svg_num(py(fy) + 4)
        << "\" text-anchor=\"end\" font-family=\"monospace\" "
           "font-size=\"11\">" << svg_num(fy) << "</text>\n";
  }

  int ci = 0;
  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << colors[ci % 4]
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i)
        out << ' ';
      out << svg_num(px(s.x[i])) << ',' << svg_num(py(s.y[i]));
    }
    out << "\"/>\n";
    out << "<text x=\"" << W - mr - 10 << "\" y=\"" << mt + 16 * (ci + 1)
        << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"12\" "
           "fill=\"" << colors[ci % 4] << "\">" << s.label << "</text>\n";
    ++ci;
  }
  out << "</svg>\n";

  std::ofstream f(path, std::ios::binary);
  if (!f)
    throw std::runtime_error("write_svg_chart: cannot open '" + path + "'");
  f << out.str();
}

} // namespace spsolve
