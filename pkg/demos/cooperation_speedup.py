"""How much can cooperation help?

On very flat isosceles cells a flanking pursuer cuts the capture time to
about half of what decentralized pursuit achieves; on thin right triangles
the survival lower bound already matches the decentralized game length, so
cooperation cannot help at all.
"""

from tripursuit.experiments import flat_isosceles_sweep, right_triangle_sweep

print("right triangles, legs 1 and s")
for row in right_triangle_sweep(1.0, (0.3, 0.1, 0.01, 0.001)):
    print(f"  s={row['s']:<6g} game length / lower bound = {row['ratio']:.6f}")

print("flat isosceles cells, base 2 and height h")
for row in flat_isosceles_sweep(2.0, (0.1, 0.01, 0.001)):
    print(f"  h={row['height']:<6g} cooperative {row['coop_time']:.4f}"
          f"  decentralized {row['decentralized_time']:.4f}  ratio {row['ratio']:.4f}")
