"""Graph-theoretic reference answers, independent of both evaluation engines."""

from __future__ import annotations

from collections import deque

from .structures import Relation


def _succ(E, n):
    out = [[] for _ in range(n)]
    for a, b in sorted(E.tuples if isinstance(E, Relation) else E):
        out[a].append(b)
    return out


def has_cycle(E, n: int) -> bool:
    """True iff the digraph ``E`` on ``range(n)`` has a directed cycle."""
    succ = _succ(E, n)
    WHITE, GREY, BLACK = 0, 1, 2
    colour = [WHITE] * n
    for root in range(n):
        if colour[root] != WHITE:
            continue
        colour[root] = GREY
        stack = [(root, iter(succ[root]))]
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                colour[node] = BLACK
                stack.pop()
            elif colour[nxt] == GREY:
                return True
            elif colour[nxt] == WHITE:
                colour[nxt] = GREY
                stack.append((nxt, iter(succ[nxt])))
    return False


def agap_player1_wins(P, E, n: int) -> bool:
    """Solve the alternating reachability game on (P, E).

    Player I picks a start in P; then player II and player I alternate
    moving along E, II first.  A player with no move loses; infinite plays
    go to player I.  Player II's winning positions are computed as an
    attractor (least fixed point of "II to move can reach a II-win", "I to
    move is forced into a II-win") by backward propagation.
    """
    starts = {t[0] for t in (P.tuples if isinstance(P, Relation) else P)}
    succ = _succ(E, n)
    pred = [[] for _ in range(n)]
    for a in range(n):
        for b in succ[a]:
            pred[b].append(a)
    # node (a, 0): player II to move from a; node (a, 1): player I to move from a
    ii_wins = set()
    pending = [len(succ[a]) for a in range(n)]   # I-to-move nodes: unrefuted moves left
    queue = deque()
    for a in range(n):
        if not succ[a]:
            ii_wins.add((a, 1))      # player I is stuck
            queue.append((a, 1))
    while queue:
        a, turn = queue.popleft()
        for p in pred[a]:
            if turn == 1:
                # II to move at p can go to a, where I is lost
                node = (p, 0)
                if node not in ii_wins:
                    ii_wins.add(node)
                    queue.append(node)
            else:
                # I to move at p: one more successor leads to a II win
                node = (p, 1)
                if node in ii_wins:
                    continue
                pending[p] -= 1
                if pending[p] == 0:
                    ii_wins.add(node)
                    queue.append(node)
    return any((a, 0) not in ii_wins for a in starts)


def reachability(E, n: int) -> Relation:
    """Transitive closure of ``E``: pairs joined by a path of length >= 1."""
    succ = _succ(E, n)
    out = set()
    for a in range(n):
        seen = set()
        queue = deque(succ[a])
        while queue:
            b = queue.popleft()
            if b in seen:
                continue
            seen.add(b)
            queue.extend(succ[b])
        out.update((a, b) for b in seen)
    return Relation(2, frozenset(out))
