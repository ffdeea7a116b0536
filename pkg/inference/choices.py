from django.db import models


class Statistic(models.TextChoices):
	KS = "ks", "KS.depth"
	CVM = "cvm", "CvM.depth"


class EvalGrid(models.TextChoices):
	SPHERE = "sphere", "Unit sphere"
	POOLED = "pooled", "Pooled points"
