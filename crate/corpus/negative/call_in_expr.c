int f() { return 1; }
int main() { int x = f() + 1; }
