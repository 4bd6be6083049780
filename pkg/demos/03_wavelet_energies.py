"""Wavelet detail energies and splice boundaries.

A pasted patch leaves an intensity/texture discontinuity along its
border, which shows up as extra energy in high-frequency wavelet detail
subbands. This script takes one image, pastes a smoother patch into a
copy of it, and compares the subband energy moments (e1 = mean absolute
coefficient, e2 = root mean square) before and after.
"""

import numpy as np

from splicestat import GrayImage, dwt_haar, gaussian_filter, subband_energy

rng = np.random.default_rng(2)

def noise_image(sigma):
    base = np.clip(rng.normal(128, 45, (128, 128)), 0, 255)
    return gaussian_filter(GrayImage(base), sigma)

original = noise_image(sigma=0.8)          # textured
donor = noise_image(sigma=2.5)             # much smoother

pixels = original.pixels.copy()
pixels[40:88, 40:88] = donor.pixels[40:88, 40:88]
spliced = GrayImage(pixels)

print(f"{'subband':<22}{'original e1':>13}{'spliced e1':>12}"
      f"{'original e2':>13}{'spliced e2':>12}")
for sb_o, sb_s in zip(dwt_haar(original, 3), dwt_haar(spliced, 3)):
    e_o = subband_energy(sb_o)
    e_s = subband_energy(sb_s)
    name = f"level {sb_o.level} {sb_o.orientation}"
    print(f"{name:<22}{e_o.e1:>13.3f}{e_s.e1:>12.3f}{e_o.e2:>13.3f}{e_s.e2:>12.3f}")

print("\nInside the patch the smoother texture now carries *less* "
      "fine-scale energy, while the pasted border injects isolated "
      "large coefficients; both shifts move (e1, e2) away from the "
      "original, which is exactly what the classifier keys on. "
      "Note e1 <= e2 always (power-mean inequality).")
