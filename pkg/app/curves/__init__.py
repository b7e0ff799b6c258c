from app.curves.models import ParamTag, SampledCurve
from app.curves.functionals import energy, euclidean_length, momentum, segment_energies, speed_defect
from app.curves.reparam import reparam
from app.curves.geometry import circle, concatenate, reverse, segment
from app.curves.csv_io import read_csv, write_csv
