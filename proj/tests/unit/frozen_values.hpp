#pragma once
// Generated by tests/oracles/freeze_values.py (mpmath, 40 digits). Do not edit by hand.

namespace frozen {
// ln Gamma(7.3), Stirling at 27.3 then recurrence
inline constexpr double kLogGamma7_3 = 7.1478925230222490328;
// Gamma(2.5, 1.7) by quadrature of the defining integral
inline constexpr double kUpperGamma2_5_1_7 = 0.84887678945832062478;
// I_0.2(3.4), power-series partial sums until term < 1e-16
inline constexpr double kBesselI0_2_3_4 = 6.7312687268773342;
// 2F1(1, 4.1; 2.6; 0.62), 10000-term direct series
inline constexpr double kHyp2F1_1_4_1_2_6_0_62 = 5.5982029646886847823;
// Q_1.4(1.1, 0.9), quadrature of the defining integral
inline constexpr double kMarcumQ_1_4_1_1_0_9 = 0.89159897651736131807;
// Q_1(2, 2), quadrature of the defining integral
inline constexpr double kMarcumQ_1_2_2 = 0.60350096061199334895;
// kappa-mu SNR pdf (2, 1.5, 2) at gamma = 1
inline constexpr double kSnrPdf_2_1_5_2_at_1 = 0.34723055468776726114;
// kappa-mu SNR cdf (1.07, 0.91, 1) at gamma = 1, quadrature of the pdf
inline constexpr double kSnrCdf_D2D_at_1 = 0.60920379469288203563;
// Rice/Rice P(gamma_M > gamma_E), K = 15 / 12, gbar = 2 / 1, nested quadrature
inline constexpr double kRiceSpsc_15_12_2_1 = 0.90437960979878877387;
}  // namespace frozen
