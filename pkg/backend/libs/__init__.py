# Reusable libraries package
