int main() { int *p; }
