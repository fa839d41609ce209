/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

// Chebyshev expansion of erfcx(x) = exp(x^2) erfc(x) on [0, inf) in the
// variable t = (x - K) / (x + K).  Generated by tools/gen_erfcx_coeffs.py;
// max relative error 1.1e-15 on [0, 40].

namespace aemos::simd::detail {

inline constexpr double kErfcxShift = 3.75;

inline constexpr double kErfcxCheb[] = {
    3.05071540961600218e-01,
    -4.34841272712577498e-01,
    1.76351193643605492e-01,
    -6.07107956092494128e-02,
    1.77120689956941149e-02,
    -4.32111938556729424e-03,
    8.54216676887098653e-04,
    -1.27155090609162749e-04,
    1.12481672436711889e-05,
    3.13063885421820962e-07,
    -2.70988068537762001e-07,
    3.07376227014076869e-08,
    2.51562038481762281e-09,
    -1.02892992132031916e-09,
    2.99440521199499406e-11,
    2.60517896872669364e-11,
    -2.63483992417196925e-12,
    -6.43404509890636488e-13,
    1.12457401801663451e-13,
    1.72815333899860971e-14,
    -4.26410169494237499e-15,
    -5.45371977880190590e-16,
    1.58697607761671234e-16,
    2.08998378443340439e-17,
    -5.90052686940880590e-18,
    -9.41893387554428305e-19,
};

inline constexpr int kErfcxTerms = sizeof(kErfcxCheb) / sizeof(kErfcxCheb[0]);

}  // namespace aemos::simd::detail
