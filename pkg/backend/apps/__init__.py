# Backend apps package
