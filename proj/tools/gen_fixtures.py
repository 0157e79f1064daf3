#!/usr/bin/env python3
"""Writes the SAS+ fixture tasks and manifests under tests/fixtures.

Deterministic: rerunning produces identical files.
"""

import argparse
import itertools
import os
import random


class Builder:
    def __init__(self, metric=False):
        self.metric = metric
        self.vars = []  # (name, [value names])
        self.ops = []   # (name, pre dict, eff dict, cost)
        self.init = {}
        self.goal = {}

    def var(self, name, values):
        self.vars.append((name, list(values)))
        return len(self.vars) - 1

    def op(self, name, pre, eff, cost=1):
        self.ops.append((name, dict(pre), dict(eff), cost))

    def render(self):
        out = ["begin_version", "3", "end_version",
               "begin_metric", "1" if self.metric else "0", "end_metric",
               str(len(self.vars))]
        for i, (name, values) in enumerate(self.vars):
            out += ["begin_variable", "var%d" % i, "-1", str(len(values))]
            out += values
            out.append("end_variable")
        out.append("0")
        out.append("begin_state")
        out += [str(self.init[i]) for i in range(len(self.vars))]
        out.append("end_state")
        out.append("begin_goal")
        out.append(str(len(self.goal)))
        out += ["%d %d" % (v, self.goal[v]) for v in sorted(self.goal)]
        out.append("end_goal")
        out.append(str(len(self.ops)))
        for name, pre, eff, cost in self.ops:
            prevail = sorted((v, x) for v, x in pre.items() if v not in eff)
            out += ["begin_operator", name, str(len(prevail))]
            out += ["%d %d" % p for p in prevail]
            out.append(str(len(eff)))
            for v in sorted(eff):
                out.append("0 %d %d %d" % (v, pre.get(v, -1), eff[v]))
            out += [str(cost), "end_operator"]
        out.append("0")
        return "\n".join(out) + "\n"


def atoms(pred, objs):
    return ["Atom %s(%s)" % (pred, ", ".join(o)) for o in objs]


def flip():
    b = Builder()
    v = b.var("light", ["Atom off()", "Atom on()"])
    b.op("switch-on", {v: 0}, {v: 1})
    b.init = {v: 0}
    b.goal = {v: 1}
    return b


def chain(n):
    b = Builder()
    v = b.var("pos", ["Atom at(p%d)" % i for i in range(n + 1)])
    for i in range(n):
        b.op("step p%d p%d" % (i, i + 1), {v: i}, {v: i + 1})
    b.init = {v: 0}
    b.goal = {v: n}
    return b


def cyclic_counter(n, up_cost, down_cost, goal):
    b = Builder(metric=True)
    v = b.var("count", ["Atom value(c%d)" % i for i in range(n)])
    w = b.var("flag", ["Atom raised()", "NegatedAtom raised()"])
    for i in range(n):
        b.op("inc c%d" % i, {v: i}, {v: (i + 1) % n}, up_cost)
        b.op("dec c%d" % i, {v: i}, {v: (i - 1) % n}, down_cost)
    b.op("raise", {v: goal, w: 1}, {w: 0}, 2)
    b.op("lower", {w: 0}, {w: 1}, 0)
    b.init = {v: 0, w: 1}
    b.goal = {v: goal, w: 0}
    return b


def truck_package(num_locs, num_packages, seed):
    rng = random.Random(seed)
    b = Builder(metric=True)
    locs = ["l%d" % i for i in range(num_locs)]
    truck = b.var("truck", ["Atom at(truck, %s)" % l for l in locs])
    pkgs = []
    for p in range(num_packages):
        pkgs.append(b.var("package%d" % p,
                          ["Atom at(p%d, %s)" % (p, l) for l in locs] +
                          ["Atom in(p%d, truck)" % p]))
    for i in range(num_locs):
        for j in (i - 1, i + 1):
            if 0 <= j < num_locs:
                b.op("drive %s %s" % (locs[i], locs[j]), {truck: i}, {truck: j},
                     1 + (i + j) % 3)
    for p, var in enumerate(pkgs):
        for i in range(num_locs):
            b.op("load p%d %s" % (p, locs[i]), {truck: i, var: i}, {var: num_locs}, 1)
            b.op("unload p%d %s" % (p, locs[i]), {truck: i, var: num_locs}, {var: i}, 1)
    b.init = {truck: 0}
    b.goal = {}
    for var in pkgs:
        start = rng.randrange(num_locs)
        target = rng.randrange(num_locs)
        if target == start:
            target = (start + 1) % num_locs
        b.init[var] = start
        b.goal[var] = target
    return b


def gripper(num_balls):
    b = Builder()
    robot = b.var("robby", ["Atom at-robby(rooma)", "Atom at-robby(roomb)"])
    free = []
    for g in ("left", "right"):
        free.append(b.var("free-" + g, ["Atom free(%s)" % g, "NegatedAtom free(%s)" % g]))
    balls = []
    for i in range(num_balls):
        balls.append(b.var("ball%d" % i, [
            "Atom at(ball%d, rooma)" % i, "Atom at(ball%d, roomb)" % i,
            "Atom carry(ball%d, left)" % i, "Atom carry(ball%d, right)" % i]))
    rooms = ["rooma", "roomb"]
    b.op("move rooma roomb", {robot: 0}, {robot: 1})
    b.op("move roomb rooma", {robot: 1}, {robot: 0})
    for i, ball in enumerate(balls):
        for r, room in enumerate(rooms):
            for g, gname in enumerate(("left", "right")):
                b.op("pick ball%d %s %s" % (i, room, gname),
                     {robot: r, ball: r, free[g]: 0}, {ball: 2 + g, free[g]: 1})
                b.op("drop ball%d %s %s" % (i, room, gname),
                     {robot: r, ball: 2 + g}, {ball: r, free[g]: 0})
    b.init = {robot: 0, free[0]: 0, free[1]: 0}
    b.goal = {}
    for ball in balls:
        b.init[ball] = 0
        b.goal[ball] = 1
    return b


def blocksworld(n, seed):
    rng = random.Random(seed)
    names = ["b%d" % i for i in range(n)]
    b = Builder()
    # pos value k < n: on block k; n: on table; n + 1: held.
    pos = [b.var("pos-" + x, ["Atom on(%s, %s)" % (x, y) for y in names] +
                 ["Atom on-table(%s)" % x, "Atom holding(%s)" % x]) for x in names]
    clear = [b.var("clear-" + x, ["Atom clear(%s)" % x, "NegatedAtom clear(%s)" % x])
             for x in names]
    hand = b.var("hand", ["Atom handempty()", "NegatedAtom handempty()"])
    table, held = n, n + 1
    for i, x in enumerate(names):
        b.op("pick-up " + x, {pos[i]: table, clear[i]: 0, hand: 0},
             {pos[i]: held, clear[i]: 1, hand: 1})
        b.op("put-down " + x, {pos[i]: held}, {pos[i]: table, clear[i]: 0, hand: 0})
        for j, y in enumerate(names):
            if i == j:
                continue
            b.op("stack %s %s" % (x, y), {pos[i]: held, clear[j]: 0},
                 {pos[i]: j, clear[j]: 1, clear[i]: 0, hand: 0})
            b.op("unstack %s %s" % (x, y), {pos[i]: j, clear[i]: 0, hand: 0},
                 {pos[i]: held, clear[j]: 0, clear[i]: 1, hand: 1})

    def random_towers():
        order = list(range(n))
        rng.shuffle(order)
        below = {}
        towers = []
        for blk in order:
            if towers and rng.random() < 0.6:
                t = rng.randrange(len(towers))
                below[blk] = towers[t][-1]
                towers[t].append(blk)
            else:
                below[blk] = None
                towers.append([blk])
        return below

    start = random_towers()
    goal = random_towers()
    while goal == start:
        goal = random_towers()
    b.init = {hand: 0}
    covered = {v for v in start.values() if v is not None}
    for i in range(n):
        b.init[pos[i]] = table if start[i] is None else start[i]
        b.init[clear[i]] = 1 if i in covered else 0
    b.goal = {pos[i]: (table if goal[i] is None else goal[i]) for i in range(n)}
    return b


def visitall(width, height):
    b = Builder()
    cells = [(x, y) for y in range(height) for x in range(width)]
    name = ["cell-%d-%d" % c for c in cells]
    at = b.var("robot", ["Atom at-robot(%s)" % c for c in name])
    visited = [b.var("visited-" + c, ["Atom visited(%s)" % c, "NegatedAtom visited(%s)" % c])
               for c in name]
    index = {c: i for i, c in enumerate(cells)}
    for (x, y), i in index.items():
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            j = index.get((x + dx, y + dy))
            if j is not None:
                b.op("move %s %s" % (name[i], name[j]), {at: i}, {at: j, visited[j]: 0})
    b.init = {at: 0}
    for i in range(len(cells)):
        b.init[visited[i]] = 0 if i == 0 else 1
    b.goal = {visited[i]: 0 for i in range(len(cells))}
    return b


def oneway():
    """Goal variable with an irreversible detour: some states are dead ends."""
    b = Builder(metric=True)
    pos = b.var("pos", ["Atom at(start)", "Atom at(mid)", "Atom at(goal)",
                        "Atom at(trap)", "Atom at(pit)"])
    key = b.var("key", ["Atom has-key()", "NegatedAtom has-key()"])
    fuel = b.var("fuel", ["Atom fuel(f0)", "Atom fuel(f1)", "Atom fuel(f2)"])
    b.op("go start mid", {pos: 0, fuel: 2}, {pos: 1, fuel: 1}, 2)
    b.op("go start mid slow", {pos: 0, fuel: 1}, {pos: 1, fuel: 0}, 3)
    b.op("go mid goal", {pos: 1, key: 0}, {pos: 2}, 1)
    b.op("go start trap", {pos: 0}, {pos: 3}, 1)
    b.op("go trap pit", {pos: 3}, {pos: 4}, 1)
    b.op("go mid start", {pos: 1, fuel: 1}, {pos: 0, fuel: 0}, 1)
    b.op("take-key", {pos: 0, key: 1}, {key: 0}, 1)
    b.op("burn-fuel", {fuel: 2}, {fuel: 1}, 1)
    b.init = {pos: 0, key: 1, fuel: 2}
    b.goal = {pos: 2}
    return b


def unsolvable():
    b = Builder()
    a = b.var("a", ["Atom a0()", "Atom a1()", "Atom a2()"])
    c = b.var("c", ["Atom c()", "NegatedAtom c()"])
    b.op("a0-a1", {a: 0}, {a: 1})
    b.op("a1-a0", {a: 1}, {a: 0})
    b.op("set-c", {a: 1, c: 1}, {c: 0})
    b.init = {a: 0, c: 1}
    b.goal = {a: 2, c: 0}
    return b


def mutual_lock():
    """Unsolvable, but every goal value is reachable in its own DTG."""
    b = Builder()
    x = b.var("x", ["Atom x()", "NegatedAtom x()"])
    y = b.var("y", ["Atom y()", "NegatedAtom y()"])
    z = b.var("z", ["Atom z()", "NegatedAtom z()"])
    b.op("set-x", {y: 0, x: 1}, {x: 0})
    b.op("set-y", {x: 0, y: 1}, {y: 0})
    b.op("toggle-z", {z: 1}, {z: 0})
    b.op("untoggle-z", {z: 0}, {z: 1})
    b.init = {x: 1, y: 1, z: 1}
    b.goal = {x: 0, y: 0}
    return b


AXIOM_TASK = """begin_version
3
end_version
begin_metric
0
end_metric
2
begin_variable
var0
-1
2
Atom p()
NegatedAtom p()
end_variable
begin_variable
var1
0
2
Atom derived()
NegatedAtom derived()
end_variable
0
begin_state
1
1
end_state
begin_goal
1
1 0
end_goal
1
begin_operator
make-p
0
1
0 0 1 0
1
end_operator
1
begin_rule
1
0 0
1 1 0
end_rule
"""

# Gripper with one ball, laid out as the translator writes it: real mutex
# groups, interleaved naming, two-gripper free variables.
TRANSLATOR_TASK = """begin_version
3
end_version
begin_metric
0
end_metric
4
begin_variable
var0
-1
2
Atom at-robby(rooma)
Atom at-robby(roomb)
end_variable
begin_variable
var1
-1
2
Atom free(left)
NegatedAtom free(left)
end_variable
begin_variable
var2
-1
2
Atom free(right)
NegatedAtom free(right)
end_variable
begin_variable
var3
-1
4
Atom at(ball1, rooma)
Atom at(ball1, roomb)
Atom carry(ball1, left)
Atom carry(ball1, right)
end_variable
3
begin_mutex_group
3
3 0
3 1
3 2
end_mutex_group
begin_mutex_group
3
3 0
3 1
3 3
end_mutex_group
begin_mutex_group
2
1 0
3 2
end_mutex_group
begin_state
0
0
0
0
end_state
begin_goal
1
3 1
end_goal
10
begin_operator
drop ball1 rooma left
1
0 0
2
0 3 2 0
0 1 -1 0
1
end_operator
begin_operator
drop ball1 rooma right
1
0 0
2
0 3 3 0
0 2 -1 0
1
end_operator
begin_operator
drop ball1 roomb left
1
0 1
2
0 3 2 1
0 1 -1 0
1
end_operator
begin_operator
drop ball1 roomb right
1
0 1
2
0 3 3 1
0 2 -1 0
1
end_operator
begin_operator
move rooma roomb
0
1
0 0 0 1
1
end_operator
begin_operator
move roomb rooma
0
1
0 0 1 0
1
end_operator
begin_operator
pick ball1 rooma left
1
0 0
2
0 3 0 2
0 1 0 1
1
end_operator
begin_operator
pick ball1 rooma right
1
0 0
2
0 3 0 3
0 2 0 1
1
end_operator
begin_operator
pick ball1 roomb left
1
0 1
2
0 3 1 2
0 1 0 1
1
end_operator
begin_operator
pick ball1 roomb right
1
0 1
2
0 3 1 3
0 2 0 1
1
end_operator
0
"""


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=os.path.join(
        os.path.dirname(os.path.abspath(__file__)), "..", "tests", "fixtures"))
    args = parser.parse_args()
    out = os.path.abspath(args.out)
    os.makedirs(out, exist_ok=True)

    tasks = {
        "flip.sas": flip(),
        "chain10.sas": chain(10),
        "counter.sas": cyclic_counter(7, 1, 3, 5),
        "truck2.sas": truck_package(4, 2, 7),
        "truck3.sas": truck_package(5, 3, 11),
        "oneway.sas": oneway(),
        "unsolvable.sas": unsolvable(),
        "mutual_lock.sas": mutual_lock(),
    }
    for n in range(1, 7):
        tasks["gripper%d.sas" % n] = gripper(n)
    for n in range(3, 8):
        tasks["blocks%d.sas" % n] = blocksworld(n, 100 + n)
    for w, h in ((2, 2), (3, 2), (3, 3), (4, 3), (4, 4), (5, 4)):
        tasks["visitall%dx%d.sas" % (w, h)] = visitall(w, h)
    for n in (4, 5, 6, 7, 8):
        tasks["truck-%d.sas" % n] = truck_package(n, n - 1, 200 + n)
    for name, builder in tasks.items():
        with open(os.path.join(out, name), "w") as f:
            f.write(builder.render())
    with open(os.path.join(out, "axiom.sas"), "w") as f:
        f.write(AXIOM_TASK)
    with open(os.path.join(out, "translator_gripper1.sas"), "w") as f:
        f.write(TRANSLATOR_TASK)

    training = [
        ("gripper", ["gripper1.sas", "gripper2.sas", "gripper3.sas", "gripper4.sas",
                     "gripper5.sas"]),
        ("blocks", ["blocks3.sas", "blocks4.sas", "blocks5.sas", "blocks6.sas",
                    "blocks7.sas"]),
        ("visitall", ["visitall2x2.sas", "visitall3x2.sas", "visitall3x3.sas",
                      "visitall4x3.sas", "visitall4x4.sas"]),
        ("truck", ["truck-4.sas", "truck-5.sas", "truck-6.sas", "truck-7.sas",
                   "truck-8.sas"]),
    ]
    with open(os.path.join(out, "training.manifest"), "w") as f:
        f.write("# domain task\n")
        for domain, files in training:
            for name in files:
                f.write("%s %s\n" % (domain, name))
    suite = [("gripper", "gripper2.sas"), ("gripper", "gripper6.sas"),
             ("blocks", "blocks5.sas"), ("visitall", "visitall5x4.sas"),
             ("truck", "truck3.sas"), ("misc", "oneway.sas"),
             ("misc", "unsolvable.sas")]
    with open(os.path.join(out, "suite.manifest"), "w") as f:
        f.write("# domain task\n")
        for domain, name in suite:
            f.write("%s %s\n" % (domain, name))


if __name__ == "__main__":
    main()
