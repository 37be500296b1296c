import random

import pytest

from explab.maze import (AvatarState, MazeParseError, MazeSpec, MazeValidationError,
                         SUB_STEPS, apply_blocked_variant, distances_from, edge,
                         observe, parse_maze, propose_blocked_edges, reachable_cells,
                         render_maze, shortest_path, start_state, step)
from explab.mazegen import generate_maze

from .oracles import corridor_position_oracle, flood_fill

RING = "#####\n#S..#\n#.#.#\n#..G#\n#####\n"
TEE = "#####\n#...#\n##.##\n#####\n"


# --- parsing -----------------------------------------------------------------

def test_parse_ring_maze_floor_and_goal():
    maze = parse_maze(RING)
    # Hand enumeration: 8 floor characters around the central wall.
    assert len(maze.floor) == 8
    assert maze.start_cell == (1, 1)
    assert maze.start_heading == "N"
    assert maze.goal == (3, 3)


def test_parse_goal_is_optional():
    maze = parse_maze(RING.replace("G", "."))
    assert maze.goal is None


def test_parse_rejects_multiple_starts():
    with pytest.raises(MazeParseError, match="multiple starts"):
        parse_maze(RING.replace("G", "S"))


def test_parse_rejects_missing_start():
    with pytest.raises(MazeParseError, match="no start"):
        parse_maze(RING.replace("S", "."))


def test_parse_rejects_ragged_grid():
    with pytest.raises(MazeParseError, match="ragged"):
        parse_maze("#####\n#S.#\n#####\n")


def test_parse_rejects_unknown_character():
    with pytest.raises(MazeParseError, match="unknown character"):
        parse_maze(RING.replace(".", "x", 1))


def test_parse_rejects_floor_on_border():
    with pytest.raises(MazeValidationError, match="border"):
        parse_maze("#.###\n#S..#\n#####\n")


def test_parse_rejects_unreachable_goal():
    text = "#######\n#S.#.G#\n#######\n"
    with pytest.raises(MazeValidationError, match="unreachable"):
        parse_maze(text)


def test_parse_apples_and_sealed_cells():
    text = "#####\n#S.a#\n#.#.#\n#.BG#\n#####\n"
    maze = parse_maze(text)
    assert maze.apples == {(3, 1)}
    sealed = (2, 3)
    assert edge(sealed, (1, 3)) in maze.blocked_edges
    assert edge(sealed, (3, 3)) in maze.blocked_edges


def test_sealed_cell_cutting_off_goal_is_rejected():
    text = "#####\n#S..#\n###B#\n###G#\n#####\n"
    with pytest.raises(MazeValidationError, match="unreachable"):
        parse_maze(text)


def test_render_round_trips_hand_mazes():
    for text in (RING, TEE.replace(".", "S", 1), "#####\n#S.a#\n#.#.#\n#.BG#\n#####\n"):
        maze = parse_maze(text)
        assert parse_maze(render_maze(maze)) == maze


def test_render_round_trips_generated_corpus():
    for seed in range(12):
        for style in ("perfect", "braided"):
            maze = generate_maze(9, 7, style, seed)
            again = parse_maze(render_maze(maze), maze.id)
            assert again == maze


def test_render_rejects_partial_seals():
    maze = parse_maze(RING)
    variant = apply_blocked_variant(maze, [((1, 1), (2, 1))])
    with pytest.raises(ValueError, match="not representable"):
        render_maze(variant)


# --- movement ----------------------------------------------------------------

def test_forward_into_wall_is_a_noop():
    maze = parse_maze(RING)
    state = AvatarState(cell=(1, 1), sub_offset=SUB_STEPS - 1, heading="N")
    assert step(maze, state, "forward") == state


def test_turn_right_rotates_in_place():
    maze = parse_maze(RING)
    state = AvatarState(cell=(1, 1), sub_offset=2, heading="N")
    turned = step(maze, state, "turn_right")
    assert turned.heading == "E"
    assert (turned.cell, turned.sub_offset) == ((1, 1), 2)


def test_four_turns_restore_state():
    maze = parse_maze(RING)
    state = AvatarState(cell=(2, 1), sub_offset=3, heading="W")
    for _ in range(4):
        state = step(maze, state, "turn_right")
    assert state == AvatarState(cell=(2, 1), sub_offset=3, heading="W")


def test_forward_crossing_enters_adjacent_cell_at_offset_zero():
    # Derived from the sub-step arithmetic oracle with K=5.
    maze = parse_maze(RING)
    state = AvatarState(cell=(1, 2), sub_offset=SUB_STEPS - 1, heading="N")
    nxt = step(maze, state, "forward")
    assert nxt == AvatarState(cell=(1, 1), sub_offset=0, heading="N")


def test_back_crossing_lands_at_far_offset():
    maze = parse_maze(RING)
    state = AvatarState(cell=(1, 1), sub_offset=0, heading="N")
    nxt = step(maze, state, "back")
    assert nxt == AvatarState(cell=(1, 2), sub_offset=SUB_STEPS - 1, heading="N")


def test_strafe_left_crosses_with_collision_rule():
    maze = parse_maze(RING)
    # Heading N at (2,1): left is west toward (1,1), open.
    state = AvatarState(cell=(2, 1), sub_offset=SUB_STEPS - 1, heading="N")
    assert step(maze, state, "strafe_left").cell == (1, 1)
    # Heading S at (2,1): left is east toward (3,1), open; below is a wall.
    state = AvatarState(cell=(2, 1), sub_offset=SUB_STEPS - 1, heading="S")
    assert step(maze, state, "strafe_left").cell == (3, 1)


def test_step_matches_corridor_position_oracle():
    corridor = parse_maze("#####\n#S..#\n#####\n")
    rng = random.Random(11)
    for _ in range(200):
        moves = [rng.choice(["forward", "back"]) for _ in range(40)]
        state = AvatarState(cell=(1, 1), sub_offset=0, heading="E")
        for m in moves:
            state = step(corridor, state, m)
        want = corridor_position_oracle(3, 1, SUB_STEPS, moves)
        assert (state.cell[0], state.sub_offset) == want


def test_step_rejects_unknown_action():
    maze = parse_maze(RING)
    with pytest.raises(ValueError, match="unknown action"):
        step(maze, start_state(maze), "jump")


def test_movement_never_leaves_floor_or_crosses_seals_fuzz():
    rng = random.Random(7)
    actions = ["forward", "back", "strafe_left", "turn_right"]
    for seed in range(10):
        maze = generate_maze(9, 9, "braided", seed)
        cells = sorted(reachable_cells(maze))
        for _ in range(20):
            state = AvatarState(cell=rng.choice(cells),
                                sub_offset=rng.randrange(SUB_STEPS),
                                heading=rng.choice("NESW"))
            for _ in range(60):
                prev = state
                state = step(maze, state, rng.choice(actions))
                assert state.cell in maze.floor
                if state.cell != prev.cell:
                    assert maze.passable(prev.cell, state.cell)


def test_step_is_deterministic():
    maze = parse_maze(RING)
    state = AvatarState(cell=(2, 3), sub_offset=1, heading="W")
    assert step(maze, state, "forward") == step(maze, state, "forward")


# --- observation -------------------------------------------------------------

def test_observe_dead_end_sees_down_the_corridor():
    maze = parse_maze(TEE.replace(".", "S", 1))  # start at (1,1); T junction at (2,1)
    obs = observe(maze, AvatarState(cell=(2, 2), heading="N"))
    # Hand ray-march: north ray reaches (2,1) then hits the border wall.
    assert obs.visible_cells == {(2, 2), (2, 1)}
    assert obs.local_walls == {"N": True, "E": False, "S": False, "W": False}


def test_observe_on_goal_flag():
    maze = parse_maze(RING)
    assert observe(maze, AvatarState(cell=(3, 3))).on_goal
    assert not observe(maze, AvatarState(cell=(1, 1))).on_goal


def test_observe_single_cell_room():
    maze = parse_maze("###\n#S#\n###\n")
    obs = observe(maze, start_state(maze))
    assert obs.visible_cells == {(1, 1)}


def test_observe_stops_at_blocked_edges():
    maze = parse_maze(RING)
    variant = apply_blocked_variant(maze, [((2, 1), (3, 1))])
    obs = observe(variant, AvatarState(cell=(1, 1), heading="N"))
    assert obs.visible_cells == {(1, 1), (2, 1), (1, 2), (1, 3)}


def test_observe_sees_apples_in_line_of_sight_only():
    maze = parse_maze("#####\n#S.a#\n#.#.#\n#..G#\n#####\n")
    obs = observe(maze, start_state(maze))
    assert obs.apples_visible == {(3, 1)}
    obs2 = observe(maze, AvatarState(cell=(1, 3)))
    assert obs2.apples_visible == frozenset()


# --- reachability and variants ------------------------------------------------

def test_reachable_ring_is_all_floor():
    maze = parse_maze(RING)
    assert reachable_cells(maze) == maze.floor
    assert reachable_cells(maze) == flood_fill(maze)


def test_reachable_excludes_severed_branch():
    corridor = parse_maze("#####\n#S..#\n#####\n")
    variant = apply_blocked_variant(corridor, [((2, 1), (3, 1))])
    assert reachable_cells(variant) == {(1, 1), (2, 1)}
    assert reachable_cells(variant) == flood_fill(variant)


def test_reachable_single_cell():
    maze = parse_maze("###\n#S#\n###\n")
    assert reachable_cells(maze) == {(1, 1)}


def test_reachable_contains_start_on_generated_corpus():
    for seed in range(8):
        maze = generate_maze(9, 7, "perfect", seed)
        reach = reachable_cells(maze)
        assert maze.start_cell in reach
        assert reach == flood_fill(maze)


def test_blocked_variant_keeps_goal_reachable_via_other_arm():
    maze = parse_maze(RING)
    variant = apply_blocked_variant(maze, [((2, 1), (3, 1))])
    assert maze.goal in reachable_cells(variant)
    assert variant.blocked_edges == {edge((2, 1), (3, 1))}


def test_blocked_variant_rejects_goal_disconnection():
    corridor = parse_maze("#####\n#S.G#\n#####\n")
    with pytest.raises(MazeValidationError, match="unreachable"):
        apply_blocked_variant(corridor, [((2, 1), (3, 1))])


def test_blocked_variant_empty_edits_is_identity():
    maze = parse_maze(RING)
    assert apply_blocked_variant(maze, []) == maze


def test_blocked_variant_rejects_non_adjacent_edit():
    maze = parse_maze(RING)
    with pytest.raises(MazeValidationError, match="adjacent"):
        apply_blocked_variant(maze, [((1, 1), (3, 1))])


def test_propose_blocked_edges_lengthens_the_direct_route():
    # Direct corridor of length 4 on top, length-8 detour underneath.
    maze = parse_maze("#######\n#S...G#\n#.###.#\n#.....#\n#######\n")
    edits = propose_blocked_edges(maze)
    variant = apply_blocked_variant(maze, edits)
    base = distances_from(maze, maze.start_cell)[maze.goal]
    after = distances_from(variant, variant.start_cell)[variant.goal]
    assert after > base
    assert maze.goal in reachable_cells(variant)


def test_propose_blocked_edges_rejects_equal_armed_ring():
    # Both arms of the 8-cell ring are most-direct routes; sealing one of
    # each would disconnect the goal, so no valid blocked variant exists.
    with pytest.raises(MazeValidationError, match="detour"):
        propose_blocked_edges(parse_maze(RING))


def test_propose_blocked_edges_needs_a_detour():
    corridor = parse_maze("#####\n#S.G#\n#####\n")
    with pytest.raises(MazeValidationError, match="detour"):
        propose_blocked_edges(corridor)


def test_shortest_path_is_deterministic_and_valid():
    maze = parse_maze(RING)
    path = shortest_path(maze, maze.start_cell, maze.goal)
    assert path[0] == maze.start_cell and path[-1] == maze.goal
    assert len(path) == distances_from(maze, maze.start_cell)[maze.goal] + 1
    for a, b in zip(path, path[1:]):
        assert maze.passable(a, b)
    assert path == shortest_path(maze, maze.start_cell, maze.goal)
