#pragma once

#include <array>
#include <string>

namespace cdnet::testing {

struct LayerRowOracle {
  const char* name;
  int kernel;
  int stride;
  const char* out_shape;
};

// Layer table of the full-width W-Net at 256x256x3 input, transcribed by hand.
inline constexpr std::array<LayerRowOracle, 17> kWNetTable = {{
    {"Input", 0, 0, "256x256x3"},
    {"Conv1-1,Conv2-1", 3, 1, "256x256x64"},
    {"Conv1-2,Conv2-2", 3, 2, "128x128x128"},
    {"Conv1-3,Conv2-3", 3, 1, "128x128x256"},
    {"Conv1-4,Conv2-4", 3, 2, "64x64x512"},
    {"Conv1-5,Conv2-5", 3, 1, "64x64x512"},
    {"Conv1-6,Conv2-6", 3, 2, "32x32x512"},
    {"Conv1-7,Conv2-7", 3, 1, "32x32x512"},
    {"Conv1-8,Conv2-8", 3, 2, "16x16x(512+512)"},
    {"DeConv-1", 3, 1, "16x16x512"},
    {"DeConv-2", 3, 2, "32x32x(512+512+512)"},
    {"DeConv-3", 3, 1, "32x32x512"},
    {"DeConv-4", 3, 2, "64x64x(512+512+512)"},
    {"DeConv-5", 3, 1, "64x64x256"},
    {"DeConv-6", 3, 2, "128x128x(128+128+128)"},
    {"DeConv-7", 3, 1, "128x128x64"},
    {"DeConv-8", 3, 2, "256x256x1"},
}};

// Confusion counts (tp, fp, tn, fn) = (50, 10, 900, 40), rates derived by hand:
//   mar = 40/90, far = 10/910, oer = 50/1000, pcc = 950/1000,
//   pre = (90*60 + 910*940) / 1000^2 = 0.8608, kappa = (0.95 - 0.8608) / (1 - 0.8608).
inline constexpr double kOracleMar = 0.444444;
inline constexpr double kOracleFar = 0.010989;
inline constexpr double kOracleOer = 0.05;
inline constexpr double kOracleKappa = 0.640805;
inline constexpr double kOracleMetricTol = 1e-6;

// Adam first step on f(x) = x^2 from x0 = 1 at lr 2e-4: the bias-corrected
// step is lr * g / (|g| + eps'), i.e. 1 - 2e-4 up to eps.
inline constexpr double kAdamFirstStep = 0.9998;

// Cross-entropy values: -ln(0.5) and -ln(sigmoid(2)).
inline constexpr double kCeAtZero = 0.693147;
inline constexpr double kCeAtTwo = 0.126928;

}  // namespace cdnet::testing
