import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "ddd_site.settings")
django.setup()
