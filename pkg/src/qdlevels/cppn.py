"""Evolvable pattern networks: genomes, activation, and variation operators.

Networks are feedforward DAGs in which every node carries its own activation
function. A constant bias input of 1.0 is appended to the declared inputs at
genome creation, so a genome built for k coordinate inputs has k + 1 input
nodes and ``activate`` expects k values.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, replace

import numpy as np

ACTIVATION_KINDS = (
    "sawtooth",
    "linear_piecewise",
    "identity",
    "square_wave",
    "cosine",
    "sine",
    "sigmoid",
    "gaussian",
    "triangle_wave",
    "absolute_value",
)

# Structural mutation rates.
SPLICE_RATE = 0.20
NEW_LINK_RATE = 0.40
ACTIVATION_SWAP_RATE = 0.30
WEIGHT_PERTURB_RATE = 0.05


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(np.minimum(-x, 60.0)))


_VECTOR_ACTIVATIONS = {
    "sawtooth": lambda x: 2.0 * (x - np.floor(x)) - 1.0,
    "linear_piecewise": lambda x: np.clip(x, -1.0, 1.0),
    "identity": lambda x: x,
    "square_wave": lambda x: np.where(np.sin(np.pi * x) >= 0.0, 1.0, -1.0),
    "cosine": np.cos,
    "sine": np.sin,
    "sigmoid": _sigmoid,
    "gaussian": lambda x: np.exp(-(x * x)),
    "triangle_wave": lambda x: 2.0 * np.abs(2.0 * (x / 2.0 - np.floor(x / 2.0 + 0.5))) - 1.0,
    "absolute_value": np.abs,
}


def apply_activation(kind: str, x: np.ndarray) -> np.ndarray:
    return _VECTOR_ACTIVATIONS[kind](x)


@dataclass(frozen=True)
class NodeGene:
    id: int
    role: str  # input | hidden | output
    activation: str


@dataclass(frozen=True)
class LinkGene:
    innovation: int
    src: int
    dst: int
    weight: float
    enabled: bool


@dataclass
class CppnGenome:
    """Immutable value; variation operators return new genomes.

    ``input_count`` includes the implicit bias node, which by construction is
    the input node with the highest id.
    """

    nodes: list[NodeGene]
    links: list[LinkGene]
    input_count: int
    output_count: int

    def node_map(self) -> dict[int, NodeGene]:
        return {n.id: n for n in self.nodes}

    def input_ids(self) -> list[int]:
        return sorted(n.id for n in self.nodes if n.role == "input")

    def output_ids(self) -> list[int]:
        return sorted(n.id for n in self.nodes if n.role == "output")

    def enabled_links(self) -> list[LinkGene]:
        return [l for l in self.links if l.enabled]

    def size(self) -> tuple[int, int]:
        return len(self.nodes), len(self.links)


class InnovationCounter:
    """Monotone id source shared by all genomes of one evolutionary run.

    Mints both link innovation numbers and hidden-node ids; values strictly
    increase and are never reused. Must be owned by a single thread.
    """

    def __init__(self, start: int):
        self.next_value = start

    def take(self) -> int:
        value = self.next_value
        self.next_value += 1
        return value


def counter_for(genome: CppnGenome) -> InnovationCounter:
    top = max(
        max((n.id for n in genome.nodes), default=-1),
        max((l.innovation for l in genome.links), default=-1),
    )
    return InnovationCounter(top + 1)


def minimal_genome(input_count: int, output_count: int, rng: random.Random) -> CppnGenome:
    """Fully connected inputs-to-outputs genome with uniform [-1, 1] weights.

    ``input_count`` is the declared coordinate-input count; a bias node is
    appended after it. Link innovations are numbered 0..L-1 in a fixed order
    so that independently created minimal genomes share gene identities.
    """
    if input_count < 1 or output_count < 1:
        raise ValueError("input_count and output_count must be positive")
    nodes = [NodeGene(i, "input", "identity") for i in range(input_count + 1)]
    out_base = input_count + 1
    nodes += [NodeGene(out_base + j, "output", "identity") for j in range(output_count)]
    links = []
    innovation = 0
    for src in range(input_count + 1):
        for dst in range(out_base, out_base + output_count):
            links.append(LinkGene(innovation, src, dst, rng.uniform(-1.0, 1.0), True))
            innovation += 1
    return CppnGenome(nodes, links, input_count + 1, output_count)


def topo_order(genome: CppnGenome) -> list[int]:
    """Kahn's algorithm over enabled links; raises if a cycle exists."""
    ids = [n.id for n in genome.nodes]
    indegree = {i: 0 for i in ids}
    successors: dict[int, list[int]] = {i: [] for i in ids}
    for link in genome.links:
        if link.enabled:
            successors[link.src].append(link.dst)
            indegree[link.dst] += 1
    ready = sorted(i for i in ids if indegree[i] == 0)
    order: list[int] = []
    while ready:
        node = ready.pop(0)
        order.append(node)
        for nxt in sorted(successors[node]):
            indegree[nxt] -= 1
            if indegree[nxt] == 0:
                ready.append(nxt)
        ready.sort()
    if len(order) != len(ids):
        raise ValueError("enabled-link graph contains a cycle")
    return order


def check_genome(genome: CppnGenome) -> None:
    """Raise ValueError when any structural invariant is broken."""
    ids = [n.id for n in genome.nodes]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate node ids")
    roles = {n.id: n.role for n in genome.nodes}
    inputs = [i for i in ids if roles[i] == "input"]
    outputs = [i for i in ids if roles[i] == "output"]
    if len(inputs) != genome.input_count or len(outputs) != genome.output_count:
        raise ValueError("declared input/output counts do not match node roles")
    enabled_pairs = set()
    for link in genome.links:
        if link.src not in roles or link.dst not in roles:
            raise ValueError(f"link {link.innovation} references a missing node")
        if link.src == link.dst:
            raise ValueError("self-links are not allowed")
        if roles[link.dst] == "input":
            raise ValueError("input nodes cannot receive links")
        if link.enabled:
            if (link.src, link.dst) in enabled_pairs:
                raise ValueError(f"duplicate enabled link {link.src}->{link.dst}")
            enabled_pairs.add((link.src, link.dst))
    innovations = [l.innovation for l in genome.links]
    if len(set(innovations)) != len(innovations):
        raise ValueError("duplicate link innovations")
    topo_order(genome)


def activate_many(genome: CppnGenome, inputs: np.ndarray) -> np.ndarray:
    """Evaluate the network on a batch of input rows.

    ``inputs`` has shape (batch, input_count - 1); the bias is supplied
    internally. Returns (batch, output_count) with outputs clamped to
    [-1, 1]. Incoming links are summed in innovation order; all arithmetic
    is 64-bit.
    """
    inputs = np.asarray(inputs, dtype=np.float64)
    if inputs.ndim != 2 or inputs.shape[1] != genome.input_count - 1:
        raise ValueError(
            f"expected {genome.input_count - 1} inputs, got shape {inputs.shape}"
        )
    batch = inputs.shape[0]
    node_map = genome.node_map()
    input_ids = genome.input_ids()

    values: dict[int, np.ndarray] = {}
    for pos, node_id in enumerate(input_ids[:-1]):
        values[node_id] = inputs[:, pos]
    values[input_ids[-1]] = np.ones(batch)  # bias

    incoming: dict[int, list[LinkGene]] = {n.id: [] for n in genome.nodes}
    for link in sorted(genome.enabled_links(), key=lambda l: l.innovation):
        incoming[link.dst].append(link)

    for node_id in topo_order(genome):
        node = node_map[node_id]
        if node.role == "input":
            continue
        total = np.zeros(batch)
        for link in incoming[node_id]:
            total = total + link.weight * values[link.src]
        out = apply_activation(node.activation, total)
        if node.role == "output":
            out = np.clip(out, -1.0, 1.0)
        values[node_id] = out
    return np.stack([values[i] for i in genome.output_ids()], axis=1)


def activate(genome: CppnGenome, inputs) -> list[float]:
    """Single-query evaluation; see activate_many for semantics."""
    row = np.asarray(inputs, dtype=np.float64).reshape(1, -1)
    if row.shape[1] != genome.input_count - 1:
        raise ValueError(f"expected {genome.input_count - 1} inputs, got {row.shape[1]}")
    return activate_many(genome, row)[0].tolist()


def _would_cycle(links: list[LinkGene], src: int, dst: int) -> bool:
    """True if adding src->dst closes a cycle in the enabled-link digraph."""
    successors: dict[int, list[int]] = {}
    for link in links:
        if link.enabled:
            successors.setdefault(link.src, []).append(link.dst)
    stack = [dst]
    seen = set()
    while stack:
        node = stack.pop()
        if node == src:
            return True
        if node in seen:
            continue
        seen.add(node)
        stack.extend(successors.get(node, ()))
    return False


def splice_node(
    genome: CppnGenome,
    rng: random.Random,
    counter: InnovationCounter,
    activation: str | None = None,
) -> CppnGenome:
    """Split a random enabled link with a new node.

    The incoming link gets weight 1.0 and the outgoing link inherits the old
    weight, so an identity-activation splice preserves network function.
    Returns the genome unchanged when there is no enabled link.
    """
    enabled = genome.enabled_links()
    if not enabled:
        return genome
    target = enabled[rng.randrange(len(enabled))]
    if activation is None:
        activation = ACTIVATION_KINDS[rng.randrange(len(ACTIVATION_KINDS))]
    node_id = counter.take()
    node = NodeGene(node_id, "hidden", activation)
    links = [replace(l, enabled=False) if l.innovation == target.innovation else l
             for l in genome.links]
    links.append(LinkGene(counter.take(), target.src, node_id, 1.0, True))
    links.append(LinkGene(counter.take(), node_id, target.dst, target.weight, True))
    return CppnGenome(genome.nodes + [node], links, genome.input_count, genome.output_count)


def add_link(genome: CppnGenome, rng: random.Random, counter: InnovationCounter) -> CppnGenome:
    """Add one random feedforward link that keeps the digraph acyclic.

    Skipped silently when no legal (src, dst) pair exists.
    """
    taken = {(l.src, l.dst) for l in genome.links}
    sources = [n.id for n in genome.nodes if n.role != "output"]
    targets = [n.id for n in genome.nodes if n.role != "input"]
    candidates = [
        (s, d)
        for s in sources
        for d in targets
        if s != d and (s, d) not in taken and not _would_cycle(genome.links, s, d)
    ]
    if not candidates:
        return genome
    src, dst = candidates[rng.randrange(len(candidates))]
    link = LinkGene(counter.take(), src, dst, rng.uniform(-1.0, 1.0), True)
    return CppnGenome(genome.nodes, genome.links + [link],
                      genome.input_count, genome.output_count)


def swap_activation(genome: CppnGenome, rng: random.Random) -> CppnGenome:
    """Give one random non-input node a different activation kind."""
    eligible = [n for n in genome.nodes if n.role != "input"]
    node = eligible[rng.randrange(len(eligible))]
    others = [k for k in ACTIVATION_KINDS if k != node.activation]
    new_kind = others[rng.randrange(len(others))]
    nodes = [replace(n, activation=new_kind) if n.id == node.id else n
             for n in genome.nodes]
    return CppnGenome(nodes, genome.links, genome.input_count, genome.output_count)


def perturb_weights(genome: CppnGenome, rng: random.Random) -> CppnGenome:
    """Each link weight independently gets unit gaussian noise at 5% rate."""
    links = []
    for link in genome.links:
        if rng.random() < WEIGHT_PERTURB_RATE:
            links.append(replace(link, weight=link.weight + rng.gauss(0.0, 1.0)))
        else:
            links.append(link)
    return CppnGenome(genome.nodes, links, genome.input_count, genome.output_count)


def mutate(genome: CppnGenome, rng: random.Random, counter: InnovationCounter) -> CppnGenome:
    """Apply the four mutation kinds with their fixed rates, in order."""
    if rng.random() < SPLICE_RATE:
        genome = splice_node(genome, rng, counter)
    if rng.random() < NEW_LINK_RATE:
        genome = add_link(genome, rng, counter)
    if rng.random() < ACTIVATION_SWAP_RATE:
        genome = swap_activation(genome, rng)
    return perturb_weights(genome, rng)


def crossover(a: CppnGenome, b: CppnGenome, fitter: CppnGenome, rng: random.Random) -> CppnGenome:
    """NEAT-style recombination aligned on link innovation numbers.

    Matching genes come from either parent uniformly; genes present only in
    the fitter parent are kept, the rest dropped. The child's node set is the
    closure of the inherited links plus all inputs and outputs. Links are
    re-checked in innovation order and disabled if they would close a cycle,
    which can happen when parents disagree on enabled flags.
    """
    if (a.input_count, a.output_count) != (b.input_count, b.output_count):
        raise ValueError("parents must share input/output signature")
    if fitter is not a and fitter is not b:
        raise ValueError("fitter must be one of the parents")
    other = b if fitter is a else a

    fit_links = {l.innovation: l for l in fitter.links}
    other_links = {l.innovation: l for l in other.links}
    chosen: list[LinkGene] = []
    for innovation in sorted(fit_links):
        gene = fit_links[innovation]
        match = other_links.get(innovation)
        if match is not None and rng.random() < 0.5:
            gene = match
        chosen.append(gene)

    links: list[LinkGene] = []
    kept_enabled: list[LinkGene] = []
    for gene in chosen:
        if gene.enabled and _would_cycle(kept_enabled, gene.src, gene.dst):
            gene = replace(gene, enabled=False)
        if gene.enabled:
            kept_enabled.append(gene)
        links.append(gene)

    fit_nodes = fitter.node_map()
    other_nodes = other.node_map()
    needed = {n.id for n in fitter.nodes if n.role != "hidden"}
    for gene in links:
        needed.add(gene.src)
        needed.add(gene.dst)
    nodes = [fit_nodes.get(i) or other_nodes[i] for i in sorted(needed)]
    return CppnGenome(nodes, links, a.input_count, a.output_count)


# Text serialization: one node or link per line, weights in float hex.

GENOME_HEADER = "qdlevels-cppn 1"


def genome_to_text(genome: CppnGenome) -> str:
    lines = [GENOME_HEADER, f"signature {genome.input_count} {genome.output_count}"]
    for node in sorted(genome.nodes, key=lambda n: n.id):
        lines.append(f"node {node.id} {node.role} {node.activation}")
    for link in sorted(genome.links, key=lambda l: l.innovation):
        lines.append(
            f"link {link.innovation} {link.src} {link.dst} "
            f"{link.weight.hex()} {int(link.enabled)}"
        )
    return "\n".join(lines) + "\n"


def genome_from_text(text: str) -> CppnGenome:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or lines[0] != GENOME_HEADER:
        raise ValueError("not a genome document")
    if not lines[1].startswith("signature "):
        raise ValueError("missing signature line")
    _, n_in, n_out = lines[1].split()
    nodes: list[NodeGene] = []
    links: list[LinkGene] = []
    for line in lines[2:]:
        parts = line.split()
        if parts[0] == "node":
            nodes.append(NodeGene(int(parts[1]), parts[2], parts[3]))
        elif parts[0] == "link":
            links.append(
                LinkGene(int(parts[1]), int(parts[2]), int(parts[3]),
                         float.fromhex(parts[4]), bool(int(parts[5])))
            )
        else:
            raise ValueError(f"unknown genome line {parts[0]!r}")
    genome = CppnGenome(nodes, links, int(n_in), int(n_out))
    check_genome(genome)
    return genome
