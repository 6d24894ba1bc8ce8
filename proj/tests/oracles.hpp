#pragma once

// Frozen reference values computed once with an independent implementation
// (scikit-image 0.2x: color.deltaE_ciede2000 and color.rgb2lab, D65/2 deg).

namespace roves::oracle {

struct DeltaEPair {
  double lab1[3];
  double lab2[3];
  double delta_e;
};

// The standard 34 CIEDE2000 verification pairs.
inline constexpr DeltaEPair kCiede2000Pairs[] = {
    {{50.0, 2.6772, -79.7751}, {50.0, 0.0, -82.7485}, 2.0424596802},
    {{50.0, 3.1571, -77.2803}, {50.0, 0.0, -82.7485}, 2.8615101747},
    {{50.0, 2.8361, -74.0200}, {50.0, 0.0, -82.7485}, 3.4411905987},
    {{50.0, -1.3802, -84.2814}, {50.0, 0.0, -82.7485}, 0.9999988648},
    {{50.0, -1.1848, -84.8006}, {50.0, 0.0, -82.7485}, 1.0000047011},
    {{50.0, -0.9009, -85.5211}, {50.0, 0.0, -82.7485}, 1.0000129676},
    {{50.0, 0.0, 0.0}, {50.0, -1.0, 2.0}, 2.3668588192},
    {{50.0, -1.0, 2.0}, {50.0, 0.0, 0.0}, 2.3668588192},
    {{50.0, 2.4900, -0.0010}, {50.0, -2.4900, 0.0009}, 7.1791720113},
    {{50.0, 2.4900, -0.0010}, {50.0, -2.4900, 0.0010}, 7.1791626400},
    {{50.0, 2.4900, -0.0010}, {50.0, -2.4900, 0.0011}, 7.2194721523},
    {{50.0, 2.4900, -0.0010}, {50.0, -2.4900, 0.0012}, 7.2194742125},
    {{50.0, -0.0010, 2.4900}, {50.0, 0.0009, -2.4900}, 4.8045216858},
    {{50.0, -0.0010, 2.4900}, {50.0, 0.0010, -2.4900}, 4.8045245082},
    {{50.0, -0.0010, 2.4900}, {50.0, 0.0011, -2.4900}, 4.7460711138},
    {{50.0, 2.5000, 0.0000}, {50.0, 0.0000, -2.5000}, 4.3064820958},
    {{50.0, 2.5000, 0.0000}, {73.0, 25.0000, -18.0000}, 27.1492313007},
    {{50.0, 2.5000, 0.0000}, {61.0, -5.0000, 29.0000}, 22.8976924698},
    {{50.0, 2.5000, 0.0000}, {56.0, -27.0000, -3.0000}, 31.9030046469},
    {{50.0, 2.5000, 0.0000}, {58.0, 24.0000, 15.0000}, 19.4535214334},
    {{50.0, 2.5000, 0.0000}, {50.0, 3.1736, 0.5854}, 1.0000263434},
    {{50.0, 2.5000, 0.0000}, {50.0, 3.2972, 0.0000}, 0.9999728730},
    {{50.0, 2.5000, 0.0000}, {50.0, 1.8634, 0.5757}, 1.0000494990},
    {{50.0, 2.5000, 0.0000}, {50.0, 3.2592, 0.3350}, 1.0000347617},
    {{60.2574, -34.0099, 36.2677}, {60.4626, -34.1751, 39.4387}, 1.2644200136},
    {{63.0109, -31.0961, -5.8663}, {62.8187, -29.7946, -4.0864}, 1.2629592983},
    {{61.2901, 3.7196, -5.3901}, {61.4292, 2.2480, -4.9620}, 1.8730705001},
    {{35.0831, -44.1164, 3.7933}, {35.0232, -40.0716, 1.5901}, 1.8644952342},
    {{22.7233, 20.0904, -46.6940}, {23.0331, 14.9730, -42.5619}, 2.0372582697},
    {{36.4612, 47.8580, 18.3852}, {36.2715, 50.5065, 21.2231}, 1.4145779225},
    {{90.8027, -2.0831, 1.4410}, {91.1528, -1.6435, 0.0447}, 1.4441290781},
    {{90.9257, -0.5406, -0.9208}, {88.6381, -0.8985, -0.7239}, 1.5381170054},
    {{6.7747, -0.2908, -2.4247}, {5.8714, -0.0985, -2.2286}, 0.6377276719},
    {{2.0776, 0.0795, -1.1350}, {0.9033, -0.0636, -0.5514}, 0.9082328396},
};

struct LabReference {
  double rgb[3];
  double lab[3];
};

// The reference uses a slightly different sRGB matrix rounding, so
// comparisons use a 0.01 tolerance.
inline constexpr LabReference kLabReference[] = {
    {{1.0, 0.0, 0.0}, {53.2405879437, 80.0923082257, 67.2027510444}},
    {{0.0, 1.0, 0.0}, {87.7350994883, -86.1830297444, 83.1797031754}},
    {{0.0, 0.0, 1.0}, {32.2956725650, 79.1855909118, -107.8573002067}},
    {{0.2, 0.4, 0.6}, {42.0080005894, -0.1540411985, -32.8428974190}},
};

}  // namespace roves::oracle
