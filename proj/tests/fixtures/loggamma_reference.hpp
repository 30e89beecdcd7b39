// Generated by scripts/gen_loggamma_fixture.py (mpmath, 50 digits). Do not edit.
#pragma once

namespace cmqop::fixtures {

struct LogGammaRef {
  double re, im, lg_re, lg_im;
};

inline constexpr LogGammaRef kLogGammaReference[] = {
    {1.0, 0.0, 0.0, 0.0},
    {2.0, 0.0, 0.0, 0.0},
    {0.5, 0.0, 0.57236494292470008707, 0.0},
    {0.5, 1.0, -0.65279064420437291527, -0.95500772434256910956},
    {0.5, -1.0, -0.65279064420437291527, 0.95500772434256910956},
    {1.5, 2.25, -1.7803222974320714552, 0.94546864083503079746},
    {3.7, 0.0, 1.4280723266653881292, 0.0},
    {10.0, 0.0, 12.801827480081469611, 0.0},
    {0.75, 12.0, -17.309445038437461824, 18.212447022669345488},
    {25.0, -40.0, 29.849018814915747033, -138.94757254800082995},
    {0.6, 49.0, -75.660901116026081508, 141.85702255661074759},
    {2.0, 0.3, -0.028857402779112235903, 0.12863612231001139964},
    {7.25, 3.5, 6.1829078550545152662, 6.8315047532739026883},
    {1.0, 0.001, -8.2246676284347438175e-7, -0.0005772152642161058715},
    {0.55, -7.0, -9.9793824900720359751, -6.7056914975392992181},
    {0.25, 0.0, 1.2880225246980774574, 0.0},
    {0.1, 0.0, 2.252712651734205902, 0.0},
    {-0.5, 0.0, 1.2655121234846453965, -3.1415926535897932385},
    {-0.3, 1.2, -1.1479281720902800883, -2.4643624477514137042},
    {-2.6, 0.4, -0.77063281128279626704, -9.2389403280464314113},
    {-7.3, -3.0, -16.15987327745849666, 18.269370323941643892},
    {0.2, -5.0, -7.4175525404007520477, -2.5752787656987128062},
    {-12.5, 0.25, -20.394061143764243406, -40.199390198995916126},
    {-0.9, 30.0, -50.96707073498274621, 69.80553773181036488},
    {0.001, 0.0, 6.9071788853838536617, 0.0},
    {-1.5, 0.0001, 0.86004696848024860037, -6.2831149915154825853},
};

}  // namespace cmqop::fixtures
