from dualgap.saddle.vi import VI_METHODS, SaddleRun, operator_objective, solve_saddle, solve_vi

__all__ = ["VI_METHODS", "SaddleRun", "operator_objective", "solve_saddle", "solve_vi"]
