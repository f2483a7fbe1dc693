"""Beating the central subgroup in the max-norm Heisenberg group.

The central direction is not horizontal, so the straight segment to a
central target of height eps has length eps.  A horizontal square loop
of side beta picks up beta**2 of central drift on top of the 4*beta it
climbs directly, so choosing 4*beta + beta**2 = eps reaches the same
endpoint with length 4*beta < eps.  Run with --plot for the planar
projection of the loop (needs matplotlib).
"""

import argparse

from subfinsler import vertical_shortcut


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--eps", type=float, nargs="+",
                        default=[0.1, 1.0, 5.0])
    parser.add_argument("--plot", action="store_true")
    args = parser.parse_args()

    print(f"{'eps':>8} {'beta':>12} {'loop length':>12} {'saving':>10}")
    paths = []
    for eps in args.eps:
        path = vertical_shortcut(eps)
        paths.append(path)
        print(f"{eps:8.3f} {path.beta:12.6f} {path.length:12.6f} "
              f"{eps - path.length:10.6f}")
        print(f"{'':8} endpoint gap {path.endpoint_gap:.2e}")

    if not args.plot:
        return
    try:
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not installed; skipping the plot")
        return
    fig, ax = plt.subplots(figsize=(5, 5))
    for path in paths:
        loop = path.planar_loop()
        ax.plot(loop[:, 0], loop[:, 1], label=f"eps = {path.eps:g}")
    ax.set_xlabel("first horizontal coordinate")
    ax.set_ylabel("second horizontal coordinate")
    ax.set_aspect("equal")
    ax.legend()
    fig.tight_layout()
    plt.show()


if __name__ == "__main__":
    main()
