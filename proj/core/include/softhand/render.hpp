#pragma once

#include <string>

#include "softhand/scene.hpp"
#include "softhand/solver.hpp"

namespace softhand {

// Deterministic SVG frames: palm frame coordinates, y-up, 1 unit = 1 mm.
struct RenderStyle {
  double min_x = -260.0;
  double min_y = -140.0;
  double width = 520.0;
  double height = 420.0;
  double force_scale = 5.0;  // mm of glyph per N
  std::string flexor_color = "#2266cc";
  std::string extensor_color = "#cc3333";
  std::string phalanx_color = "#9aa0a6";
  std::string object_color = "#c9a227";
  std::string contact_color = "#111111";
};

std::string render_frame(const SimState& state, const Scene& scene,
                         const RenderStyle& style = {});

}  // namespace softhand
