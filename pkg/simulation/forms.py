from django import forms

from core.conf import get_default
from core.exceptions import DepthToolkitError
from core.nullspec import parse_distribution
from core.rng import SEED_LIMIT
from depth.halfspace import DepthMethod
from inference.choices import EvalGrid, Statistic

from .experiments import ExperimentSpec
from .scenarios import Model


class ExperimentForm(forms.Form):
    model = forms.ChoiceField(choices=Model.choices, label="Modelo")
    d = forms.IntegerField(min_value=1, label="Dimensión")
    n = forms.IntegerField(min_value=1, label="Tamaño de muestra")
    m = forms.IntegerField(min_value=1, required=False, label="Segunda muestra")
    lam = forms.FloatField(min_value=0, max_value=1, required=False, label="n/(n+m)")
    mu = forms.FloatField(required=False, label="Desplazamiento")
    gamma = forms.FloatField(min_value=0, required=False, label="Gamma")
    f0 = forms.CharField(required=False, label="F0")
    h = forms.CharField(required=False, label="H")
    two_sample = forms.BooleanField(required=False, label="Dos muestras")
    statistics = forms.MultipleChoiceField(choices=Statistic.choices, required=False, label="Estadísticos")
    alpha = forms.FloatField(required=False, label="Nivel")
    reps = forms.IntegerField(min_value=1, required=False, label="Repeticiones")
    B = forms.IntegerField(min_value=1, required=False, label="Réplicas bootstrap")
    M = forms.IntegerField(min_value=1, required=False, label="Puntos de evaluación")
    n_ref = forms.IntegerField(min_value=1, required=False, label="Muestra de referencia")
    method = forms.CharField(required=False, label="Método de profundidad")
    directions = forms.IntegerField(min_value=1, required=False, label="Direcciones")
    eval_grid = forms.ChoiceField(choices=EvalGrid.choices, required=False, label="Grilla KS")
    seed = forms.IntegerField(min_value=0, max_value=SEED_LIMIT - 1, required=False, label="Semilla")

    def clean_alpha(self):
        value = self.cleaned_data.get("alpha")
        if value is not None and not 0 < value < 1:
            raise forms.ValidationError("El nivel debe estar en (0, 1).")
        return value

    def clean_lam(self):
        value = self.cleaned_data.get("lam")
        if value is not None and not 0 < value < 1:
            raise forms.ValidationError("La razón n/(n+m) debe estar en (0, 1).")
        return value

    def clean(self):
        cleaned = super().clean()
        d = cleaned.get("d")
        if d is not None:
            for name in ("f0", "h"):
                if cleaned.get(name):
                    try:
                        parse_distribution(cleaned[name], d)
                    except DepthToolkitError as exc:
                        self.add_error(name, str(exc))
        try:
            DepthMethod.parse(cleaned.get("method") or "auto", cleaned.get("directions"))
        except DepthToolkitError as exc:
            self.add_error("method", str(exc))
        model = cleaned.get("model")
        two_sample = model == Model.B or (model == Model.CONTIGUOUS and cleaned.get("two_sample"))
        if two_sample and cleaned.get("m") is None and cleaned.get("lam") is None:
            raise forms.ValidationError("Las celdas de dos muestras necesitan m o lam.")
        return cleaned

    def to_spec(self) -> ExperimentSpec:
        data = {key: value for key, value in self.cleaned_data.items() if value not in (None, "", [])}
        directions = data.pop("directions", None)
        data["method"] = DepthMethod.parse(data.get("method") or "auto", directions)
        if "statistics" in data:
            data["statistics"] = tuple(data["statistics"])
        data.setdefault("eval_grid", get_default("EVAL_GRID"))
        return ExperimentSpec(**data)
