# Regenerates the toy streams for the running example:
#   s1 reliable, not correlated with refSensor
#   s2 reliable, correlated
#   s3 correlated, not reliable
# The reference stream is one year old (set-back 365 days).
import math
import random

YEAR = 365 * 24 * 3600 * 1000
rng = random.Random(7)


def ref(t):
    return 400 + 50 * math.sin(2 * math.pi * t / 40000)


with open("live.csv", "w") as live, open("reference.csv", "w") as hist:
    live.write("time_ms,sensor_id,value\n")
    hist.write("time_ms,sensor_id,value\n")
    for s in range(0, 181):
        t = s * 1000
        hist.write(f"{t - YEAR},refSensor,{ref(t) + rng.gauss(0, 1):.3f}\n")
        live.write(f"{t},s1,{400 + 50 * math.cos(2 * math.pi * t / 7000) + rng.gauss(0, 5):.3f}\n")
        live.write(f"{t},s2,{ref(t) + rng.gauss(0, 3):.3f}\n")
        live.write(f"{t},s3,{0.8 * ref(t) + 30 + rng.gauss(0, 3):.3f}\n")
