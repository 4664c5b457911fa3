from . import __version__ as app_version

app_name = "nonreciprocal_entanglement"
app_title = "Nonreciprocal Entanglement"
app_publisher = "itsdave GmbH"
app_description = "Stationäre Simulation nichtreziproker Verschränkung in molekularer Optomechanik"
app_email = "dev@itsdave.de"
app_license = "MIT"

# Fixtures
# --------
# records shipped with the app, loaded from fixtures/<name>.json

fixtures = [
	"sweep_presets"
]

# Provenance
# ----------
# header lines written in front of every emitted result file

def provenance_header():
	return {
		"app": app_name,
		"title": app_title,
		"version": app_version,
	}
