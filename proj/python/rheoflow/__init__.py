from ._rheoflow import (
    CarreauParams,
    CsvParseError,
    IcnnModel,
    ModelParseError,
    NonConvergenceError,
    PowerLawParams,
    RheologyDataset,
    TrainingDiverged,
    carreau_eval,
    convergence_study,
    fit,
    load_dataset_csv,
    load_model,
    sample_carreau_dataset,
    save_dataset_csv,
    save_model,
    solve,
    synthetic_xanthan_dataset,
    verify,
    viscosity_deriv,
    viscosity_eval,
)

__all__ = [
    "CarreauParams",
    "CsvParseError",
    "IcnnModel",
    "ModelParseError",
    "NonConvergenceError",
    "PowerLawParams",
    "RheologyDataset",
    "TrainingDiverged",
    "carreau_eval",
    "convergence_study",
    "fit",
    "load_dataset_csv",
    "load_model",
    "sample_carreau_dataset",
    "save_dataset_csv",
    "save_model",
    "solve",
    "synthetic_xanthan_dataset",
    "verify",
    "viscosity_deriv",
    "viscosity_eval",
]
