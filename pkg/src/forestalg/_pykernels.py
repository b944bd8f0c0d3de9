"""Pure-Python kernels; reference semantics for the compiled ``_kernels``.

Transformations are tuples of ints over ``range(n)``.  Closure results come
back as ``(images, parents)`` where ``parents[i] = (op, a, b)``:

* ``(GEN, k, -1)``      generator number ``k``
* ``(COMPOSE, a, b)``   ``images[a] o images[b]`` (``b`` applied first)
* ``(ADD, a, b)``       pointwise ``images[a] + images[b]``
* ``(MULT, m, a)``      ``m``-fold pointwise self-sum of ``images[a]``
"""
from __future__ import annotations

GEN, COMPOSE, ADD, MULT = 0, 1, 2, 3


class ClosureLimitExceeded(RuntimeError):
    pass


def monoid_closure(gens, limit=20000):
    """All non-empty products of ``gens`` (left multiplication by generators)."""
    index: dict = {}
    images: list = []
    parents: list = []
    gen_pos = []
    for k, g in enumerate(gens):
        g = tuple(g)
        if g not in index:
            if len(images) >= limit:
                raise ClosureLimitExceeded(limit)
            index[g] = len(images)
            images.append(g)
            parents.append((GEN, k, -1))
        gen_pos.append(index[g])
    gen_imgs = [images[p] for p in gen_pos]
    i = 0
    while i < len(images):
        x = images[i]
        for gp, g in zip(gen_pos, gen_imgs):
            y = tuple([g[v] for v in x])
            if y not in index:
                if len(images) >= limit:
                    raise ClosureLimitExceeded(limit)
                index[y] = len(images)
                images.append(y)
                parents.append((COMPOSE, gp, i))
        i += 1
    return images, parents


def closure(gens, add=None, compose=True, pointwise_add=False, multiples=False, limit=20000):
    """Least set containing ``gens`` closed under the selected operations."""
    if (pointwise_add or multiples) and add is None:
        raise ValueError("an addition table is required")
    index: dict = {}
    images: list = []
    parents: list = []

    def push(img, parent):
        if img in index:
            return
        if len(images) >= limit:
            raise ClosureLimitExceeded(limit)
        index[img] = len(images)
        images.append(img)
        parents.append(parent)

    for k, g in enumerate(gens):
        push(tuple(g), (GEN, k, -1))
    k = 0
    while k < len(images):
        x = images[k]
        if multiples:
            seen = {x}
            cur = x
            m = 1
            while True:
                cur = tuple([add[c][e] for c, e in zip(cur, x)])
                m += 1
                if cur in seen:
                    break
                seen.add(cur)
                push(cur, (MULT, m, k))
        for j in range(k + 1):
            y = images[j]
            if compose:
                push(tuple([x[e] for e in y]), (COMPOSE, k, j))
                push(tuple([y[e] for e in x]), (COMPOSE, j, k))
            if pointwise_add:
                push(tuple([add[a][b] for a, b in zip(x, y)]), (ADD, k, j))
                push(tuple([add[b][a] for a, b in zip(x, y)]), (ADD, j, k))
        k += 1
    return images, parents


def eval_flat(node_img, parent, act, add, zero):
    """Evaluate a flattened forest.

    ``node_img[i]`` is the vertical element labelling node ``i`` (preorder),
    ``parent[i]`` its parent or ``-1``.  Returns ``(sub, total)`` where
    ``sub[i]`` is the value of the subforest below node ``i``.
    """
    n = len(node_img)
    acc = [zero] * n
    total = zero
    for i in range(n - 1, -1, -1):
        tv = act[node_img[i]][acc[i]]
        p = parent[i]
        if p >= 0:
            acc[p] = add[tv][acc[p]]
        else:
            total = add[tv][total]
    return acc, total
