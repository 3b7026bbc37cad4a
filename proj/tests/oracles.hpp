#pragma once

// Frozen reference values used as independent oracles in the test suite.
// Bessel values were generated once with scipy.special at double precision
// and are pinned here verbatim; closed-form constants are written as exact
// expressions where possible.

namespace oracles {

inline constexpr double kBesselX[] = {0.01, 0.1,  0.5,  1.0,  2.0,    5.0,   11.9, 12.1,
                                      17.9, 18.1, 50.0, 100.0, 665.0, 1000.0, 9500.0};

inline constexpr double kJ0[] = {
    9.99975000156249516e-01,  9.97501562066040015e-01,  9.38469807240812970e-01,
    7.65197686557966494e-01,  2.23890779141235619e-01,  -1.77596771314338292e-01,
    2.50494416995898604e-02,  6.96667736068075222e-02,  -3.21094576865553205e-02,
    5.42702483849266584e-03,  5.58123276692520862e-02,  1.99858503042233300e-02,
    -7.12702481462624063e-03, 2.47866861524200302e-02,  4.68419781309125250e-03,
};

inline constexpr double kJ1[] = {
    4.99993750026041586e-03,  4.99375260362419984e-02,  2.42268457674873872e-01,
    4.40050585744933553e-01,  5.76724807756873403e-01,  -3.27579137591465286e-01,
    -2.28983249661924043e-01, -2.15748973376924863e-01, -1.86765368913496682e-01,
    -1.87350182706376156e-01, -9.75118281251750874e-02, -7.71453520141122950e-02,
    -3.01139741259322732e-02, 4.72831190708902002e-03,  -6.71323977795842356e-03,
};

inline constexpr double kY0[] = {
    -3.00545563708364583e+00, -1.53423865135036674e+00, -4.44518733506706620e-01,
    8.82569642156769696e-02,  5.10375672649745149e-01,  -3.08517625249033034e-01,
    -2.29833213943375109e-01, -2.18438380550925459e-01, -1.85797013231439156e-01,
    -1.87428809200037766e-01, -9.80649954700769239e-02, -7.72443133650830976e-02,
    -3.01086069531726619e-02, 4.71591797762358628e-03,  -6.71348630538977365e-03,
};

inline constexpr double kY1[] = {
    -6.36785962820606670e+01, -6.45895109470202744e+00, -1.47147239267024332e+00,
    -7.81212821300288796e-01, -1.07032431540937556e-01, 1.47863143391226914e-01,
    -3.47114983340304287e-02, -7.87369314513955698e-02, 2.69360728805868137e-02,
    -1.06027644755368362e-02, -5.67956685620148727e-02, -2.03723120027593206e-02,
    7.10438879161347757e-03,  -2.47843312923518681e-02, -4.68455116096757555e-03,
};

inline constexpr double kJ1Zeros[] = {
    3.83170597020751247e+00, 7.01558666981561885e+00, 1.01734681350627216e+01,
    1.33236919363142228e+01, 1.64706300508776344e+01,
};

// Radial combination u(x) = -(A J1(x) + B Y1(x)) / x with A = Y1(1),
// B = -J1(1), so u(1) = 0 and u'(1) = 2/pi (the Wronskian).
inline constexpr double kComboA = -7.81212821300288796e-01;
inline constexpr double kComboB = -4.40050585744933553e-01;
inline constexpr double kComboU_1p5 = 1.69620333762213943e-01;
inline constexpr double kComboU_10 = 1.43540849966040714e-02;
inline constexpr double kComboU_100 = -6.92317859269413562e-04;
inline constexpr double kComboU_199p5 = -7.09320436918399591e-05;
inline constexpr double kComboDU1 = 6.36619772367581382e-01;

}  // namespace oracles
