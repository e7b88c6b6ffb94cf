#pragma once

// Period-cell geometry of a strip waveguide with one "room-and-passage"
// protuberance per period: a thin vertical channel (passage) of width d and
// height h connects the strip (0,eps)x(-L,0) to a rectangular cavity (room)
// of size (b*room_width)x(b*room_height) sitting on top of the channel.

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>

#include "rpwg/errors.hpp"

namespace rpwg {

struct Rect {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // x0 < x1, y0 < y1

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
};

enum class Region : int { Strip = 0, Passage = 1, Room = 2 };

inline std::string_view region_name(Region r) {
  switch (r) {
    case Region::Strip: return "STRIP";
    case Region::Passage: return "PASSAGE";
    case Region::Room: return "ROOM";
  }
  return "?";
}

/// All geometric/material parameters of one period of the perturbed strip.
///
/// The reference room is the axis-aligned rectangle
/// (-room_width/2, room_width/2) x (0, room_height), scaled by b and centered
/// over the passage. `unperturbed` selects the control geometry: a plain strip
/// cell without passage or room (b, d, h, rho_room, R are then ignored).
struct WaveguideParams {
  double eps = 0.25;      // period length; 1/eps must be a positive integer
  double L = 1.0;         // strip width (> 0)
  double b = 0.25;        // room scale
  double d = 0.015625;    // passage width
  double h = 0.25;        // passage height
  double rho_room = 1.0;  // weight constant on the room
  double R = 0.5;         // mouth fraction in (0,1)
  double room_width = 1.0;
  double room_height = 1.0;
  bool unperturbed = false;

  static WaveguideParams strip(double eps, double L) {
    WaveguideParams p;
    p.eps = eps;
    p.L = L;
    p.unperturbed = true;
    return p;
  }

  double room_area_unit() const { return room_width * room_height; }
};

/// Wrapper marking a parameter set that has passed validate_params.
struct ValidatedParams {
  WaveguideParams p;
  const WaveguideParams* operator->() const { return &p; }
};

namespace detail {

// 1/eps must be a positive integer up to 1e-9 relative slack (so that decimal
// spellings like 0.3333333333333333 of 1/3 are accepted).
inline std::optional<std::int64_t> reciprocal_integer(double eps) {
  if (!(eps > 0) || !std::isfinite(eps)) return std::nullopt;
  const double inv = 1.0 / eps;
  const double rounded = std::round(inv);
  if (rounded < 1.0) return std::nullopt;
  if (std::abs(inv - rounded) > 1e-9 * rounded) return std::nullopt;
  return static_cast<std::int64_t>(rounded);
}

}  // namespace detail

/// Checks every parameter invariant; returns the set marked valid or throws.
inline ValidatedParams validate_params(const WaveguideParams& p) {
  auto fail = [](ErrorCode code, const std::string& msg) -> ValidatedParams {
    throw Error(code, msg);
  };

  if (!detail::reciprocal_integer(p.eps)) {
    std::ostringstream os;
    os << "eps = " << p.eps << " is not the reciprocal of a positive integer";
    return fail(ErrorCode::PERIOD_NOT_RECIPROCAL_INTEGER, os.str());
  }
  if (!(p.L > 0)) return fail(ErrorCode::GEOMETRY_VIOLATION, "strip width L must be positive");
  if (p.unperturbed) return ValidatedParams{p};

  if (!(p.h > 0)) return fail(ErrorCode::GEOMETRY_VIOLATION, "passage height h must be positive");
  if (!(p.rho_room > 0)) return fail(ErrorCode::GEOMETRY_VIOLATION, "room weight rho_room must be positive");
  if (!(p.R > 0 && p.R < 1)) return fail(ErrorCode::GEOMETRY_VIOLATION, "mouth fraction R must lie in (0,1)");
  if (!(p.b > 0)) return fail(ErrorCode::GEOMETRY_VIOLATION, "room scale b must be positive");
  if (!(p.d > 0)) return fail(ErrorCode::GEOMETRY_VIOLATION, "passage width d must be positive");
  if (p.d > p.R * p.b) {
    std::ostringstream os;
    os << "R^{-1} d <= b violated: d = " << p.d << " > R*b = " << p.R * p.b;
    return fail(ErrorCode::GEOMETRY_VIOLATION, os.str());
  }
  if (p.b > p.eps) {
    std::ostringstream os;
    os << "b <= eps violated: b = " << p.b << " > eps = " << p.eps;
    return fail(ErrorCode::GEOMETRY_VIOLATION, os.str());
  }
  // Reference room sits inside (-1/2,1/2) x (0,inf) and its bottom edge must
  // contain the mouth segment (-R/2, R/2) x {0}.
  if (!(p.room_width > 0 && p.room_width <= 1.0))
    return fail(ErrorCode::GEOMETRY_VIOLATION, "room_width must lie in (0, 1]");
  if (!(p.room_height > 0)) return fail(ErrorCode::GEOMETRY_VIOLATION, "room_height must be positive");
  if (p.room_width < p.R) {
    std::ostringstream os;
    os << "room bottom edge must contain the mouth: room_width = " << p.room_width
       << " < R = " << p.R;
    return fail(ErrorCode::GEOMETRY_VIOLATION, os.str());
  }
  return ValidatedParams{p};
}

/// Tagged rectangles of one period cell. Passage and room are absent for the
/// unperturbed control geometry.
struct CellGeometry {
  Rect strip_rect;
  std::optional<Rect> passage_rect;
  std::optional<Rect> room_rect;
  double eps = 0;
  double rho_room = 1.0;

  bool perturbed() const { return passage_rect.has_value(); }
  double total_area() const {
    double a = strip_rect.area();
    if (passage_rect) a += passage_rect->area();
    if (room_rect) a += room_rect->area();
    return a;
  }
};

/// Lays out the three tagged rectangles of one period cell.
///
/// strip   (0, eps) x (-L, 0)
/// passage [eps/2 - d/2, eps/2 + d/2] x [0, h]
/// room    centered at x1 = eps/2, bottom edge at x2 = h,
///         size (b*room_width) x (b*room_height)
inline CellGeometry build_cell(const ValidatedParams& vp) {
  const WaveguideParams& p = vp.p;
  CellGeometry cell;
  cell.eps = p.eps;
  cell.strip_rect = Rect{0.0, -p.L, p.eps, 0.0};
  cell.rho_room = p.unperturbed ? 1.0 : p.rho_room;
  if (p.unperturbed) return cell;

  const double cx = p.eps / 2;
  cell.passage_rect = Rect{cx - p.d / 2, 0.0, cx + p.d / 2, p.h};
  const double rw = p.b * p.room_width;
  const double rh = p.b * p.room_height;
  cell.room_rect = Rect{cx - rw / 2, p.h, cx + rw / 2, p.h + rh};
  return cell;
}

/// Target limits of the small-eps parameter family:
///   alpha = lim d*rho / (h * b^2 * |B|),   r = lim b^2 * |B| / (eps * rho).
struct ScalingPreset {
  double alpha = 1.0;
  double r = 1.0;
  double L = 1.0;
  double room_area_unit = 1.0;  // |B| of the reference room
};

/// Parameter family realizing the preset limits exactly at each eps:
///   b = eps, h = eps, rho = eps*|B|/r, d = alpha*r*eps^2.
/// Both limit quotients then hold with equality for every eps, and
/// eps*ln(d) -> 0. Only valid while d <= R*b, i.e. eps <= R/(alpha*r).
/// The reference room is a rectangle of width 1 and height room_area_unit.
inline WaveguideParams asymptotic_preset(const ScalingPreset& s, double eps, double R = 0.5) {
  WaveguideParams p;
  p.eps = eps;
  p.L = s.L;
  p.R = R;
  p.room_width = 1.0;
  p.room_height = s.room_area_unit;
  p.b = eps;
  p.h = eps;
  p.rho_room = eps * s.room_area_unit / s.r;
  p.d = s.alpha * s.r * eps * eps;
  if (p.d > p.R * p.b) {
    std::ostringstream os;
    os << "preset (alpha=" << s.alpha << ", r=" << s.r << ") needs d = alpha*r*eps^2 <= R*eps; "
       << "admissible only for eps <= " << R / (s.alpha * s.r) << ", got eps = " << eps;
    throw Error(ErrorCode::GEOMETRY_VIOLATION, os.str());
  }
  return validate_params(p).p;
}

}  // namespace rpwg
