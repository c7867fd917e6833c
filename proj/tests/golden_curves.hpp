#pragma once

// Reference integral-point lists for the curves y^2 = x(x-c)(x+2c), for every
// 1 <= c <= 50 with more than the three trivial root points.  Computed
// independently with a computer-algebra system's unconditional IntegralPoints
// routine (complete over all x, points listed modulo negation; y normalized
// to |y| here).  The bounded sweep must reproduce each list exactly as long
// as its x-bound clears the largest listed x (226875 for c = 30).

#include <cstdint>
#include <utility>
#include <vector>

namespace golden {

struct CurvePoints {
  std::uint32_t c;
  std::vector<std::pair<std::int64_t, std::int64_t>> points;  // (x, |y|), ascending x
};

inline const std::vector<CurvePoints>& nontrivial_curves() {
  static const std::vector<CurvePoints> data{
      {2, {{-4, 0}, {-2, 4}, {-1, 3}, {0, 0}, {2, 0}, {4, 8}, {8, 24}, {50, 360}}},
      {8, {{-16, 0}, {-8, 32}, {-4, 24}, {0, 0}, {8, 0}, {9, 15}, {16, 64}, {32, 192}, {200, 2880}}},
      {13, {{-26, 0}, {0, 0}, {13, 0}, {121, 1386}}},
      {15, {{-30, 0}, {-5, 50}, {0, 0}, {15, 0}, {24, 108}, {90, 900}}},
      {17, {{-34, 0}, {-32, 56}, {0, 0}, {17, 0}, {833, 24276}}},
      {18,
       {{-36, 0}, {-32, 80}, {-18, 108}, {-9, 81}, {0, 0}, {18, 0}, {36, 216}, {72, 648}, {450, 9720}}},
      {22, {{-44, 0}, {-32, 144}, {0, 0}, {22, 0}, {198, 2904}}},
      {23, {{-46, 0}, {0, 0}, {23, 0}, {50, 360}}},
      {26, {{-52, 0}, {-49, 105}, {0, 0}, {26, 0}, {1300, 47320}}},
      {30, {{-60, 0},  {-50, 200}, {-45, 225},   {-24, 216},     {-20, 200},
            {-6, 108}, {0, 0},     {30, 0},      {36, 144},      {40, 200},
            {75, 675}, {90, 900},  {300, 5400},  {324, 6048},    {480, 10800},
            {7290, 623700}, {10830, 1128600}, {226875, 108070875}}},
      {32,
       {{-64, 0}, {-32, 256}, {-16, 192}, {0, 0}, {32, 0}, {36, 120}, {64, 512}, {128, 1536}, {800, 23040}}},
      {33, {{-66, 0}, {0, 0}, {33, 0}, {81, 756}}},
      {35, {{-70, 0},    {-49, 294},  {-45, 300},  {-40, 300},     {-14, 196},
            {0, 0},      {35, 0},     {50, 300},   {175, 2450},    {224, 3528},
            {280, 4900}, {4410, 294000}, {14450, 1739100}}},
      {39, {{-78, 0}, {0, 0}, {39, 0}, {147, 1890}}},
      {42, {{-84, 0}, {-56, 392}, {-12, 216}, {0, 0}, {42, 0}, {63, 441}, {294, 5292}}},
      {43, {{-86, 0}, {-32, 360}, {0, 0}, {43, 0}}},
      {46, {{-92, 0}, {0, 0}, {46, 0}, {26496, 4316640}}},
      {50,
       {{-100, 0}, {-50, 500}, {-25, 375}, {-4, 144}, {0, 0}, {50, 0}, {100, 1000}, {200, 3000}, {1250, 45000}}},
  };
  return data;
}

}  // namespace golden
