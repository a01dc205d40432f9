import random

import pytest

from errors import ColoringError, OracleCapError
from graph_core import Violation
from oracle import Coloring, brute_force_chromatic, brute_force_decide, verify_coloring
from helpers import (
	classical_chromatic,
	coloring_ok_nx,
	complete_graph,
	cycle_graph,
	path_graph,
	random_graph,
	with_random_f,
)


def test_triangle_colouring_valid_for_k1_only():
	g = complete_graph(3)
	c = Coloring((0, 0, 1), 2)

	assert verify_coloring(g, c, 1).valid
	verdict = verify_coloring(g, c, 0)
	assert not verdict.valid
	colour, bad = verdict.first_violation()
	assert colour == 0
	assert bad.violation is Violation.PATH_TOO_LONG


def test_singleton_classes_are_always_valid():
	g = complete_graph(5)

	assert verify_coloring(g, Coloring(tuple(range(5)), 5), 0).valid


def test_partial_colouring_is_an_input_error():
	with pytest.raises(ColoringError):
		Coloring.from_mapping(3, {0: 0, 1: 1})
	with pytest.raises(ColoringError):
		verify_coloring(path_graph(3), Coloring((0, 0), 1), 1)


def test_colour_outside_palette_is_an_input_error():
	with pytest.raises(ColoringError):
		verify_coloring(path_graph(2), Coloring((0, 2), 2), 1)


def test_from_mapping_infers_palette():
	c = Coloring.from_mapping(3, {2: 1, 0: 0, 1: 3})

	assert c.assignment == (0, 3, 1)
	assert c.num_colors == 4
	assert c.classes() == {0: [0], 1: [2], 3: [1]}


@pytest.mark.parametrize(
	"g, k, L, expected",
	[
		(path_graph(3), 1, 1, False),
		(path_graph(3), 1, 2, True),
		(complete_graph(4), 1, 2, True),
		(complete_graph(4), 0, 3, False),
	],
)
def test_brute_force_decide_examples(g, k, L, expected):
	found = brute_force_decide(g, k, L)

	assert (found is not None) is expected
	if found is not None:
		assert verify_coloring(g, found, k).valid
		assert found.assignment[0] == 0


@pytest.mark.parametrize(
	"g, k, expected",
	[
		(cycle_graph(5), 1, 2),
		(cycle_graph(5), 0, 3),
		(complete_graph(4), 0, 4),
	],
)
def test_brute_force_chromatic_examples(g, k, expected):
	assert brute_force_chromatic(g, k) == expected


def test_cap_is_enforced():
	with pytest.raises(OracleCapError):
		brute_force_decide(path_graph(16), 1, 2)
	with pytest.raises(OracleCapError):
		brute_force_chromatic(path_graph(6), 1, cap=5)


def test_chromatic_is_monotone_in_k():
	rng = random.Random(13)
	for _ in range(30):
		g = with_random_f(rng, random_graph(rng, 8, 0.4))
		values = [brute_force_chromatic(g, k) for k in range(4)]
		assert values == sorted(values, reverse=True)


def test_k0_matches_independent_set_colouring():
	rng = random.Random(21)
	for _ in range(30):
		g = random_graph(rng, rng.randint(1, 10), 0.35)
		assert brute_force_chromatic(g, 0) == classical_chromatic(g)


def test_found_colourings_pass_networkx_check():
	rng = random.Random(4)
	for _ in range(30):
		g = with_random_f(rng, random_graph(rng, 8, 0.4))
		k = rng.randint(0, 3)
		found = brute_force_decide(g, k, brute_force_chromatic(g, k))
		assert coloring_ok_nx(g, found.assignment, k)
