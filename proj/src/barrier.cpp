#include "bbmabs/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace bbmabs {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double parse_number(std::string_view text) {
  std::size_t pos = 0;
  double v = std::stod(std::string(text), &pos);
  if (pos != text.size()) throw std::invalid_argument("barrier: malformed number");
  return v;
}
}  // namespace

Barrier Barrier::constant(double level) {
  if (!(level > 0.0)) throw std::invalid_argument("barrier: constant level must be positive");
  return Barrier(ConstantBarrier{level});
}

Barrier Barrier::piecewise_linear(std::vector<std::pair<double, double>> knots) {
  if (knots.size() < 2) throw std::invalid_argument("barrier: need at least two knots");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (knots[i].second < 0.0) throw std::invalid_argument("barrier: knot levels must be >= 0");
    if (i > 0 && !(knots[i].first > knots[i - 1].first))
      throw std::invalid_argument("barrier: knot times must be strictly increasing");
  }
  return Barrier(PiecewiseLinearBarrier{std::move(knots)});
}

Barrier Barrier::curved(double t_end) {
  if (!(t_end > 0.0)) throw std::invalid_argument("barrier: curved t_end must be positive");
  return Barrier(CurvedBarrier{t_end});
}

double Barrier::level(double s) const {
  if (const auto* c = std::get_if<ConstantBarrier>(&v_)) {
    (void)s;
    return c->level;
  }
  if (const auto* cu = std::get_if<CurvedBarrier>(&v_)) {
    if (s > cu->t_end) throw std::domain_error("barrier: time past t_end");
    return analytic::constants().c * std::cbrt(cu->t_end - s);
  }
  const auto& knots = std::get<PiecewiseLinearBarrier>(v_).knots;
  if (s < knots.front().first || s > knots.back().first)
    throw std::domain_error("barrier: time outside knot range");
  auto it = std::upper_bound(knots.begin(), knots.end(), s,
                             [](double t, const auto& k) { return t < k.first; });
  if (it == knots.end()) return knots.back().second;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double w = (s - lo.first) / (hi.first - lo.first);
  return lo.second + w * (hi.second - lo.second);
}

double Barrier::slope(double s) const {
  if (std::holds_alternative<ConstantBarrier>(v_)) return 0.0;
  if (const auto* cu = std::get_if<CurvedBarrier>(&v_)) {
    if (s >= cu->t_end) throw std::domain_error("barrier: slope undefined at/past t_end");
    const double gap = cu->t_end - s;
    return -(analytic::constants().c / 3.0) / std::cbrt(gap * gap);
  }
  const auto& knots = std::get<PiecewiseLinearBarrier>(v_).knots;
  if (s < knots.front().first || s >= knots.back().first)
    throw std::domain_error("barrier: slope undefined outside knot range");
  auto it = std::upper_bound(knots.begin(), knots.end(), s,
                             [](double t, const auto& k) { return t < k.first; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  return (hi.second - lo.second) / (hi.first - lo.first);
}

analytic::LineBoundary Barrier::chord(double s1, double s2) const {
  if (!(s1 < s2)) throw std::domain_error("barrier: chord needs s1 < s2");
  const double a = level(s1);
  const double b = (level(s2) - a) / (s2 - s1);
  return {a, b};
}

double Barrier::domain_end() const {
  if (std::holds_alternative<ConstantBarrier>(v_)) return kInf;
  if (const auto* cu = std::get_if<CurvedBarrier>(&v_)) return cu->t_end;
  return std::get<PiecewiseLinearBarrier>(v_).knots.back().first;
}

double Barrier::next_knot_after(double s) const {
  const auto* pl = std::get_if<PiecewiseLinearBarrier>(&v_);
  if (!pl) return kInf;
  for (const auto& k : pl->knots)
    if (k.first > s) return k.first;
  return kInf;
}

std::string Barrier::to_config() const {
  char buf[64];
  if (const auto* c = std::get_if<ConstantBarrier>(&v_)) {
    std::snprintf(buf, sizeof buf, "constant:%.17g", c->level);
    return buf;
  }
  if (const auto* cu = std::get_if<CurvedBarrier>(&v_)) {
    std::snprintf(buf, sizeof buf, "curved:%.17g", cu->t_end);
    return buf;
  }
  std::string out = "pl:";
  const auto& knots = std::get<PiecewiseLinearBarrier>(v_).knots;
  for (std::size_t i = 0; i < knots.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.17g:%.17g", i ? "," : "", knots[i].first,
                  knots[i].second);
    out += buf;
  }
  return out;
}

Barrier Barrier::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw std::invalid_argument("barrier: expected <kind>:<params>");
  const auto kind = text.substr(0, colon);
  const auto rest = text.substr(colon + 1);
  if (kind == "constant") return constant(parse_number(rest));
  if (kind == "curved") return curved(parse_number(rest));
  if (kind == "pl") {
    std::vector<std::pair<double, double>> knots;
    std::size_t start = 0;
    while (start <= rest.size()) {
      auto comma = rest.find(',', start);
      if (comma == std::string_view::npos) comma = rest.size();
      const auto item = rest.substr(start, comma - start);
      const auto sep = item.find(':');
      if (sep == std::string_view::npos)
        throw std::invalid_argument("barrier: pl knots must be <time>:<level>");
      knots.emplace_back(parse_number(item.substr(0, sep)), parse_number(item.substr(sep + 1)));
      start = comma + 1;
    }
    return piecewise_linear(std::move(knots));
  }
  throw std::invalid_argument("barrier: unknown kind '" + std::string(kind) + "'");
}

}  // namespace bbmabs
