import matplotlib
matplotlib.use('Agg')  # So DISPLAY environment variable doesn't need to be set
