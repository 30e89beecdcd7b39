"""Regenerates tests/fixtures/loggamma_reference.hpp with mpmath at 50 digits."""
import mpmath as mp

mp.mp.dps = 50
points = [
    (1.0, 0.0), (2.0, 0.0), (0.5, 0.0), (0.5, 1.0), (0.5, -1.0), (1.5, 2.25),
    (3.7, 0.0), (10.0, 0.0), (0.75, 12.0), (25.0, -40.0), (0.6, 49.0),
    (2.0, 0.3), (7.25, 3.5), (1.0, 1e-3), (0.55, -7.0), (0.25, 0.0),
    (0.1, 0.0), (-0.5, 0.0), (-0.3, 1.2), (-2.6, 0.4), (-7.3, -3.0),
    (0.2, -5.0), (-12.5, 0.25), (-0.9, 30.0), (1e-3, 0.0), (-1.5, 1e-4),
]
with open("tests/fixtures/loggamma_reference.hpp", "w") as out:
    out.write("// Generated by scripts/gen_loggamma_fixture.py (mpmath, 50 digits). Do not edit.\n")
    out.write("#pragma once\n\nnamespace cmqop::fixtures {\n\n")
    out.write("struct LogGammaRef {\n  double re, im, lg_re, lg_im;\n};\n\n")
    out.write("inline constexpr LogGammaRef kLogGammaReference[] = {\n")
    for re, im in points:
        v = mp.loggamma(mp.mpc(re, im))
        out.write(f"    {{{re!r}, {im!r}, {mp.nstr(v.real, 20)}, {mp.nstr(v.imag, 20)}}},\n")
    out.write("};\n\n}  // namespace cmqop::fixtures\n")
