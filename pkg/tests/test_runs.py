import pytest

from flashtune.runs import OptimizationRun, write_trace_csv


def make_run(**overrides):
    fields = dict(
        evaluated=((3, (1.0, 2.0)), (5, (2.0, 1.0))),
        best=None,
        front=(3, 5),
        measurements_used=2,
        wall_time=0.1,
        stop_reason="budget",
        initial_sample=1,
    )
    fields.update(overrides)
    return OptimizationRun(**fields)


def test_trace_validation():
    run = make_run()
    assert run.evaluated_ids == (3, 5)
    assert run.acquisitions == 1
    with pytest.raises(ValueError, match="trace length"):
        make_run(measurements_used=5)
    with pytest.raises(ValueError, match="best"):
        make_run(best=99, front=None)
    with pytest.raises(ValueError, match="front"):
        make_run(front=(3, 99))
    with pytest.raises(ValueError, match="initial_sample"):
        make_run(initial_sample=7)


def test_write_trace_csv(tmp_path):
    run = make_run()
    path = tmp_path / "trace.csv"
    candidates = {3: (0.0, 1.0), 5: (1.0, 0.0)}
    write_trace_csv(run, path, candidates, ["a", "b"], ["f1", "f2"])
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "step,id,a,b,f1,f2"
    assert lines[1] == "1,3,0.0,1.0,1.0,2.0"
    assert lines[2] == "2,5,1.0,0.0,2.0,1.0"
