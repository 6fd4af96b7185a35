"""I_0, I_c, I_q and discord for the Pauli-4 game across the Werner family.

    python scripts/guessing_game_table.py
"""

import numpy as np

from discordia import game, qmat


def main():
    print(f"{'p':>5} {'I0':>8} {'Ic':>8} {'Iq':>8} {'Iq-Ic':>8} {'discord':>8}")
    for p in np.linspace(0, 1, 11):
        r = game.run_game(qmat.werner(p), game.pauli4())
        print(f"{p:5.2f} {r.i0:8.4f} {r.ic:8.4f} {r.iq:8.4f} {r.iq - r.ic:8.4f} {r.discord_before:8.4f}")


if __name__ == "__main__":
    main()
