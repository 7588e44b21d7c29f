from symtens.config import ReportConfig, SolverConfig


def test_engines_share_config_defaults():
    solver = SolverConfig(_env_file=None)
    assert solver.oracle_cutoff == 81
    assert solver.restarts == 32
    assert solver.lp_rounds == 200
    assert ReportConfig(_env_file=None).equality_tol == 1e-10


def test_environment_overrides_solver_defaults(monkeypatch):
    monkeypatch.setenv("SYMTENS_SOLVER__LP_ROUNDS", "12")
    monkeypatch.setenv("SYMTENS_SOLVER__SEED", "7")
    solver = SolverConfig(_env_file=None)
    assert solver.lp_rounds == 12
    assert solver.seed == 7


def test_model_copy_keeps_untouched_fields():
    base = SolverConfig(_env_file=None, restarts=4)
    deep = base.model_copy(update={"lp_rounds": 50})
    assert deep.lp_rounds == 50
    assert deep.restarts == 4
