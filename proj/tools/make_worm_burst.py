#!/usr/bin/env python3
"""Writes data/worm_burst.pkt: steady background traffic plus one host that
sprays the same payload at a fresh destination every 40 ms."""
import sys

END_MS = 4000
WORM = "10.0.0.66"
WORM_TAG = 0xBADC0FFEE0DDF00D


def packets():
    out = []
    tag = 0x1000
    for i, host in enumerate(("10.0.0.11", "10.0.0.12", "10.0.0.13")):
        for t in range(i * 7, END_MS, 100):
            dst = "10.0.1.1" if (t // 100) % 2 == 0 else "10.0.1.2"
            out.append((t, host, dst, 512, tag))
            tag += 1
    for n, t in enumerate(range(0, END_MS, 40)):
        dst = "10.9.%d.%d" % (n // 250, n % 250 + 1)
        out.append((t, WORM, dst, 1400, WORM_TAG))
        out.append((t + 5, WORM, dst, 1400, WORM_TAG))
    out.sort(key=lambda p: (p[0], p[1], p[2]))
    return out


def main():
    path = sys.argv[1] if len(sys.argv) > 1 else "data/worm_burst.pkt"
    with open(path, "w") as f:
        f.write("# synthetic worm burst: t_ms src dst size payload_tag\n")
        for t, src, dst, size, tag in packets():
            f.write("%d\t%s\t%s\t%d\t0x%016x\n" % (t, src, dst, size, tag))


if __name__ == "__main__":
    main()
