"""Reference Black-Scholes call prices (zero rate) at 50 significant digits.

The normal CDF is mpmath's ncdf, independent of the erfc route used in C++.
"""
import mpmath as mp

mp.mp.dps = 50

CASES = [
    (100, 100, 0.2, 0.25),
    (100, 90, 0.3, 0.5),
    (100, 130, 0.3, 120 / 255),
    (50, 55, 0.45, 10 / 255),
    (100, 100, 0.2, 1 / 255),
]


def call(s, k, sigma, tau):
    s, k, sigma, tau = map(mp.mpf, (s, k, sigma, tau))
    srt = sigma * mp.sqrt(tau)
    d1 = (mp.log(s / k) + srt**2 / 2) / srt
    d2 = d1 - srt
    return s * mp.ncdf(d1) - k * mp.ncdf(d2)


if __name__ == "__main__":
    for case in CASES:
        print(*case, mp.nstr(call(*case), 20))
