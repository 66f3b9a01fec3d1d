"""Outdoor lux from the raised-cosine curve in docs/kernels.md, for frozen test values."""

import math


def outdoor(h, peak=32000.0, sunrise=6.0, sunset=20.0, floor=0.5):
    day_length = (sunset - sunrise) % 24
    since = (h - sunrise) % 24
    if since < day_length:
        return max(floor, peak * 0.5 * (1 - math.cos(2 * math.pi * since / day_length)))
    return floor


if __name__ == "__main__":
    for h in (1, 6, 9, 13, 19.5, 21):
        print(h, repr(outdoor(h)))
