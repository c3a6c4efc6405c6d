from .params import ModelParams, Exponents
from .degrees import ThetaSequence, AssumptionTolerances, TailStatistic, ValidationReport
from .graph import DiagnosticsReport, SandwichCounts
from .explore import ComponentRecord, ZVector, SampledPath
from .limit import Excursion, DensityDiagnostic
from .nearcritical import Regime, PredictedValue, RegimePrediction, HubStatistics
from .experiment import ExperimentId, DegreeCase, OutputFormat, ExperimentConfig, ReportRow, CheckResult, FitResult, Report

__all__ = [
    "ModelParams", "Exponents",
    "ThetaSequence", "AssumptionTolerances", "TailStatistic", "ValidationReport",
    "DiagnosticsReport", "SandwichCounts",
    "ComponentRecord", "ZVector", "SampledPath",
    "Excursion", "DensityDiagnostic",
    "Regime", "PredictedValue", "RegimePrediction", "HubStatistics",
    "ExperimentId", "DegreeCase", "OutputFormat", "ExperimentConfig", "ReportRow", "CheckResult", "FitResult", "Report"
]
