import json
import random
from fractions import Fraction

import pytest

from classlang.errors import EvalError, UsageError
from classlang.evaluator import eval_program
from classlang.images import canonical_scene_json, render_svg, scene_to_json
from classlang.reader import parse_source
from classlang.universe import (
    TICK,
    Event,
    EventTrace,
    parse_trace_jsonl,
    run_headless,
    step,
    draw,
    write_frame_export,
)
from classlang.values import ObjectValue, render_value

from .conftest import load_corpus

F = Fraction


@pytest.fixture(scope="module")
def world_program():
    return load_corpus("world")


@pytest.fixture(scope="module")
def rocket_program():
    return load_corpus("rocket")


def ticks(n):
    return EventTrace((TICK,) * n)


class TestStep:
    def test_tick_increments(self, world_program):
        w = world_program
        world = step(w.initial_world, TICK, w.table, w.interp)
        assert world == ObjectValue("world", (F(11),))

    def test_key_resets(self, world_program):
        w = world_program
        world = ObjectValue("world", (F(57),))
        assert step(world, Event("key", "x"), w.table, w.interp) == \
            ObjectValue("world", (F(10),))

    def test_landed_world_ignores_events(self, rocket_program):
        r = rocket_program
        landed = ObjectValue("landed-world", ())
        assert step(landed, TICK, r.table, r.interp) is landed
        assert step(landed, Event("key", "x"), r.table, r.interp) is landed

    def test_stepping_does_not_mutate_prior_world(self, world_program):
        w = world_program
        world = w.initial_world
        before = (world.class_name, world.field_values)
        step(world, TICK, w.table, w.interp)
        assert (world.class_name, world.field_values) == before

    def test_handler_must_return_world(self):
        result = eval_program(parse_source("""
        (define-class bad (fields n)
          (define (on-tick) 42)
          (define (to-draw) (empty-scene 10 10)))
        (big-bang (new bad 0))
        """))
        with pytest.raises(EvalError, match="handler must return a world"):
            step(result.initial_world, TICK, result.table, result.interp)


class TestDraw:
    def test_world_10_draws_circle_at_10_200(self, world_program):
        w = world_program
        scene = draw(w.initial_world, w.table, w.interp)
        data = scene_to_json(scene)
        assert data["x"] == 10 and data["y"] == 200
        assert data["image"]["radius"] == 10

    def test_landed_draws_at_390(self, rocket_program):
        r = rocket_program
        scene = draw(ObjectValue("landed-world", ()), r.table, r.interp)
        assert scene_to_json(scene)["x"] == 390

    def test_downworld_400_draws_at_400(self, rocket_program):
        # evaluating the to-draw body by hand: x is the n field, 400
        r = rocket_program
        scene = draw(ObjectValue("downworld", (F(400),)), r.table, r.interp)
        assert scene_to_json(scene)["x"] == 400

    def test_missing_to_draw_is_an_error(self, world_program):
        w = world_program
        result = eval_program(parse_source("(define-class q (fields n))"))
        with pytest.raises(EvalError, match="to-draw"):
            draw(ObjectValue("q", (F(1),)), result.table, result.interp)

    def test_non_scene_draw_result(self):
        result = eval_program(parse_source("""
        (define-class bad (fields n) (define (to-draw) 42))
        """))
        with pytest.raises(EvalError, match="must return an image"):
            draw(ObjectValue("bad", (F(1),)), result.table, result.interp)


class TestRunHeadless:
    def test_five_ticks_reaches_fifteen(self, world_program):
        # oracle: folding add1 five times over 10 gives 15
        w = world_program
        final, log = run_headless(w.initial_world, ticks(5), w.table, w.interp)
        assert render_value(final) == "(new world 15)"
        assert len(log) == 6

    def test_countdown_lands_after_401_ticks(self, rocket_program):
        # countdown oracle: n reaches 0 at tick 400; tick 401 lands
        r = rocket_program
        final, log = run_headless(r.initial_world, ticks(401), r.table, r.interp)
        assert render_value(final) == "(new landed-world)"
        final_after, _ = run_headless(final, ticks(100), r.table, r.interp)
        assert render_value(final_after) == "(new landed-world)"

    def test_empty_trace(self, world_program):
        w = world_program
        final, log = run_headless(w.initial_world, EventTrace(()), w.table, w.interp)
        assert final is w.initial_world
        assert len(log) == 1

    def test_frame_count_law(self, world_program):
        w = world_program
        rng = random.Random(7)
        for _ in range(20):
            events = tuple(
                TICK if rng.random() < 0.5 else Event("key", rng.choice("abc"))
                for _ in range(rng.randint(0, 40)))
            _, log = run_headless(w.initial_world, EventTrace(events), w.table, w.interp)
            assert len(log) == len(events) + 1

    def test_landed_fixpoint(self, rocket_program):
        r = rocket_program
        landed = ObjectValue("landed-world", ())
        base = render_svg(draw(landed, r.table, r.interp))
        world = landed
        for _ in range(100):
            world = step(world, TICK, r.table, r.interp)
            assert render_svg(draw(world, r.table, r.interp)) == base

    def test_max_frames_caps_log(self, world_program):
        w = world_program
        _, log = run_headless(w.initial_world, EventTrace((TICK,) * 10, max_frames=3),
                              w.table, w.interp)
        assert len(log) == 3

    def test_error_carries_step_index(self):
        result = eval_program(parse_source("""
        (define-class fragile (fields n)
          (define (on-tick) (new fragile (/ 1 (this . n))))
          (define (to-draw) (empty-scene 10 10)))
        (big-bang (new fragile 0))
        """))
        with pytest.raises(EvalError, match="step 1: division by zero"):
            run_headless(result.initial_world, ticks(3), result.table, result.interp)

    def test_setup_requires_to_draw(self, world_program):
        w = world_program
        result = eval_program(parse_source("(define-class q (fields n))"))
        with pytest.raises(EvalError, match="to-draw"):
            run_headless(ObjectValue("q", (F(1),)), ticks(1), result.table, result.interp)


class TestTraces:
    def test_parse_tick_and_key(self):
        trace = parse_trace_jsonl('{"type":"tick"}\n{"type":"key","key":"left"}\n')
        assert trace.events == (TICK, Event("key", "left"))

    def test_blank_lines_skipped(self):
        trace = parse_trace_jsonl('\n{"type":"tick"}\n\n')
        assert trace.events == (TICK,)

    def test_mouse_reserved(self):
        with pytest.raises(UsageError, match="mouse events unsupported"):
            parse_trace_jsonl('{"type":"mouse","x":1,"y":2}')

    def test_unknown_type(self):
        with pytest.raises(UsageError, match="unknown event type"):
            parse_trace_jsonl('{"type":"scroll"}')

    def test_bad_json_names_line(self):
        with pytest.raises(UsageError, match="line 2"):
            parse_trace_jsonl('{"type":"tick"}\n{oops\n')

    def test_key_requires_name(self):
        with pytest.raises(UsageError, match="non-empty key"):
            parse_trace_jsonl('{"type":"key"}')

    def test_event_round_trip(self):
        assert Event("key", "a").to_json() == {"type": "key", "key": "a"}
        assert TICK.to_json() == {"type": "tick"}


class TestFrameExport:
    def test_export_files(self, tmp_path, world_program):
        w = world_program
        _, log = run_headless(w.initial_world, ticks(2), w.table, w.interp)
        write_frame_export(log, tmp_path)
        assert sorted(p.name for p in tmp_path.iterdir()) == [
            "frame-0000.svg", "frame-0001.svg", "frame-0002.svg", "frames.jsonl"]
        lines = (tmp_path / "frames.jsonl").read_text().splitlines()
        assert len(lines) == 3
        assert lines[0] == canonical_scene_json(log.frames[0].scene)
        assert json.loads(lines[2])["x"] == 12

    def test_export_is_deterministic(self, tmp_path, world_program):
        w = world_program
        _, log = run_headless(w.initial_world, ticks(3), w.table, w.interp)
        write_frame_export(log, tmp_path / "a")
        write_frame_export(log, tmp_path / "b")
        assert (tmp_path / "a" / "frames.jsonl").read_bytes() == \
            (tmp_path / "b" / "frames.jsonl").read_bytes()
