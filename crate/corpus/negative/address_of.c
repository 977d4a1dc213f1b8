int main() { int x = 0; int y = 1; y = &x; }
