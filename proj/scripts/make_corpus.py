"""Writes the graph corpus under data/graphs as 1-based edge lists."""
import itertools
import pathlib
import random

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "graphs"


def write(name, m, edges, comment):
    lines = [f"# {comment}", f"# vertices: {m}"]
    lines += [f"{i} {j}" for i, j in edges]
    (OUT / f"{name}.txt").write_text("\n".join(lines) + "\n")


def path(m):
    return [(i, i + 1) for i in range(1, m)]


def cycle(m):
    return path(m) + [(m, 1)]


def connected(m, edges):
    adj = {v: set() for v in range(1, m + 1)}
    for i, j in edges:
        adj[i].add(j)
        adj[j].add(i)
    seen, stack = {1}, [1]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == m


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    write("K2", 2, [(1, 2)], "single edge: the classical two-colour urn")
    write("P3", 3, path(3), "path on 3 vertices")
    write("P4", 4, path(4), "path on 4 vertices")
    write("K3", 3, cycle(3), "triangle")
    for m in (4, 5, 6, 7):
        write(f"C{m}", m, cycle(m), f"cycle on {m} vertices")
    write("K33", 6, [(i, j) for i in (1, 2, 3) for j in (4, 5, 6)], "complete bipartite K_{3,3}")
    for k in range(2, 6):
        write(f"K1_{k}", k + 1, [(1, j) for j in range(2, k + 2)], f"star K_{{1,{k}}}, centre is vertex 1")

    rng = random.Random(20240611)
    made = 0
    while made < 10:
        m = rng.randint(4, 8)
        pairs = list(itertools.combinations(range(1, m + 1), 2))
        edges = [e for e in pairs if rng.random() < 0.45]
        if not edges or not connected(m, edges):
            continue
        made += 1
        write(f"random_{made:02d}", m, edges, f"seeded random connected graph {made}")


if __name__ == "__main__":
    main()
